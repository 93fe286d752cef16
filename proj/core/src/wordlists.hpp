#pragma once

#include <string_view>
#include <vector>

#include "promptshield/corpus.hpp"

// Bundled word lists: a Zipf-weighted common-English filler vocabulary for
// synthetic text generation, a pool of distinctive candidate watermark
// phrases, and query templates for synthetic ledgers.

namespace promptshield::wordlists {

// Ordered by descending synthetic frequency.
const std::vector<std::string_view>& filler_words();

// filler_words() with 1/rank weights.
const corpus::FrequencyTable& filler_vocab();

// Rare words and multi-word phrases suitable as watermarks.
const std::vector<std::string_view>& watermark_pool();

const std::vector<std::string_view>& query_topics();

// Each form contains a single {TOPIC} placeholder.
const std::vector<std::string_view>& query_forms();

}  // namespace promptshield::wordlists
