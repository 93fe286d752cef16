#include "promptshield/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "promptshield/corpus.hpp"
#include "promptshield/errors.hpp"
#include "promptshield/rng.hpp"

namespace promptshield::attacks {

EditKind edit_kind_from_name(std::string_view name) {
  if (name == "insert") return EditKind::Insert;
  if (name == "delete") return EditKind::Delete;
  if (name == "replace") return EditKind::Replace;
  if (name == "swap") return EditKind::Swap;
  throw Error("unknown edit attack '" + std::string(name) +
              "' (expected insert, delete, replace or swap)");
}

std::string_view edit_kind_name(EditKind kind) {
  switch (kind) {
    case EditKind::Insert:
      return "insert";
    case EditKind::Delete:
      return "delete";
    case EditKind::Replace:
      return "replace";
    case EditKind::Swap:
      return "swap";
  }
  return "insert";
}

std::string edit_attack(const std::string& text, const EditAttackSpec& spec) {
  if (spec.rate < 0.0 || spec.rate > 1.0) {
    throw std::invalid_argument("edit attack rate must be in [0, 1]");
  }
  std::vector<std::string> tokens = corpus::split_whitespace_raw(text);
  const std::size_t n = tokens.size();
  const std::size_t edits =
      static_cast<std::size_t>(std::ceil(spec.rate * static_cast<double>(n) - 1e-9));
  if (n == 0 || edits == 0) return text;

  std::mt19937_64 g(spec.seed);
  for (std::size_t e = 0; e < edits; ++e) {
    switch (spec.kind) {
      case EditKind::Insert: {
        const std::string token = tokens[rng::bounded(g, tokens.size())];
        const std::size_t pos = rng::bounded(g, tokens.size() + 1);
        tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(pos), token);
        break;
      }
      case EditKind::Delete: {
        if (tokens.empty()) break;
        const std::size_t pos = rng::bounded(g, tokens.size());
        tokens.erase(tokens.begin() + static_cast<std::ptrdiff_t>(pos));
        break;
      }
      case EditKind::Replace: {
        if (tokens.empty()) break;
        const std::size_t target = rng::bounded(g, tokens.size());
        const std::size_t source = rng::bounded(g, tokens.size());
        tokens[target] = tokens[source];
        break;
      }
      case EditKind::Swap: {
        if (tokens.size() < 2) break;
        const std::size_t i = rng::bounded(g, tokens.size());
        std::size_t j = rng::bounded(g, tokens.size() - 1);
        if (j >= i) ++j;  // distinct positions
        std::swap(tokens[i], tokens[j]);
        break;
      }
    }
  }

  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

namespace {

// First m indices of a seeded partial Fisher-Yates shuffle of [0, n).
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t m,
                                        std::uint64_t seed) {
  std::vector<std::size_t> indices(n);
  std::iota(indices.begin(), indices.end(), 0);
  std::mt19937_64 g(seed);
  for (std::size_t i = 0; i < m && i + 1 < n; ++i) {
    const std::size_t j = i + rng::bounded(g, n - i);
    std::swap(indices[i], indices[j]);
  }
  indices.resize(m);
  std::sort(indices.begin(), indices.end());
  return indices;
}

}  // namespace

SubsetDilution subset_dilution(const ledger::Ledger& watermarked, double eta,
                               std::uint64_t seed) {
  if (eta < 0.0 || eta > 1.0) {
    throw std::invalid_argument("eta must be in [0, 1]");
  }
  const std::size_t n = watermarked.size();
  const std::size_t m = static_cast<std::size_t>(
      std::floor(eta * static_cast<double>(n) + 1e-9));

  SubsetDilution result;
  result.full_query_ids = watermarked.query_ids();
  result.train_set.set_source_tag(watermarked.source_tag());
  for (std::size_t index : sample_indices(n, m, seed)) {
    result.train_set.append(watermarked.records()[index]);
  }
  return result;
}

MixtureSet mixture_dilution(const ledger::Ledger& watermarked,
                            const std::vector<std::string>& clean_pool, double rho,
                            std::uint64_t seed) {
  if (rho <= 0.0 || rho > 1.0) {
    throw std::invalid_argument("rho must be in (0, 1]");
  }
  const std::size_t n = watermarked.size();
  const std::size_t total = static_cast<std::size_t>(
      std::ceil(static_cast<double>(n) / rho - 1e-9));
  const std::size_t needed = total - n;
  if (clean_pool.size() < needed) {
    throw Error("mixture dilution at rho=" + std::to_string(rho) + " requires " +
                std::to_string(needed) + " clean texts, pool has " +
                std::to_string(clean_pool.size()));
  }

  MixtureSet result;
  result.watermarked = watermarked;
  for (std::size_t index : sample_indices(clean_pool.size(), needed, seed)) {
    result.clean_texts.push_back(clean_pool[index]);
  }
  return result;
}

}  // namespace promptshield::attacks
