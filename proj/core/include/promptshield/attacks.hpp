#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "promptshield/ledger.hpp"

namespace promptshield::attacks {

enum class EditKind { Insert, Delete, Replace, Swap };

EditKind edit_kind_from_name(std::string_view name);
std::string_view edit_kind_name(EditKind kind);

// Token-level edit attack: ceil(rate * n) edits on the whitespace-delimited
// tokens of the text, deterministic given the seed.
struct EditAttackSpec {
  EditKind kind = EditKind::Insert;
  double rate = 0.1;  // fraction of tokens touched, in [0, 1]
  std::uint64_t seed = 0;
};

// Insert duplicates a random token at a random position; Delete removes a
// random token; Replace substitutes a random token with another drawn from
// the same text; Swap exchanges two distinct random positions. Zero edits
// return the text unchanged; empty text is returned unchanged.
std::string edit_attack(const std::string& text, const EditAttackSpec& spec);

// Dilution ratios: eta = |A^D|/|A| (share of the watermarked data used for
// training), rho = |A^D|/|D| (watermarked share of the training set).
struct DilutionSpec {
  double eta = 1.0;
  double rho = 1.0;
  std::uint64_t seed = 0;
};

struct SubsetDilution {
  ledger::Ledger train_set;                 // A^D, in original ledger order
  std::vector<std::string> full_query_ids;  // detection still replays all of Q
};

// Uniformly samples floor(eta * |A|) records without replacement.
SubsetDilution subset_dilution(const ledger::Ledger& watermarked, double eta,
                               std::uint64_t seed);

struct MixtureSet {
  ledger::Ledger watermarked;            // all of A
  std::vector<std::string> clean_texts;  // |D| - |A| texts from the clean pool
};

// Builds a training set of size ceil(|A| / rho) containing all of A plus
// clean texts sampled without replacement. Throws Error naming the required
// size when the pool is too small.
MixtureSet mixture_dilution(const ledger::Ledger& watermarked,
                            const std::vector<std::string>& clean_pool, double rho,
                            std::uint64_t seed);

}  // namespace promptshield::attacks
