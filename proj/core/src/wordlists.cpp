#include "wordlists.hpp"

namespace promptshield::wordlists {

const std::vector<std::string_view>& filler_words() {
  static const std::vector<std::string_view> words = {
      "the", "of", "and", "to", "in", "that", "is", "was", "for", "it",
      "with", "as", "on", "be", "at", "by", "this", "had", "not", "are",
      "but", "from", "or", "have", "an", "they", "which", "one", "you", "were",
      "her", "all", "she", "there", "would", "their", "we", "him", "been", "has",
      "when", "who", "will", "more", "no", "if", "out", "so", "said", "what",
      "up", "its", "about", "into", "than", "them", "can", "only", "other", "new",
      "some", "could", "time", "these", "two", "may", "then", "do", "first", "any",
      "my", "now", "such", "like", "our", "over", "man", "me", "even", "most",
      "made", "after", "also", "did", "many", "before", "must", "through", "back",
      "years", "where", "much", "your", "way", "well", "down", "should", "because",
      "each", "just", "those", "people", "how", "too", "little", "state", "good",
      "very", "make", "world", "still", "own", "see", "men", "work", "long", "get",
      "here", "between", "both", "life", "being", "under", "never", "day", "same",
      "another", "know", "while", "last", "might", "us", "great", "old", "year",
      "off", "come", "since", "against", "go", "came", "right", "used", "take",
      "three", "states", "himself", "few", "house", "use", "during", "without",
      "again", "place", "american", "around", "however", "home", "small", "found",
      "thought", "went", "say", "part", "once", "general", "high", "upon",
      "school", "every", "does", "got", "united", "left", "number", "course",
      "war", "until", "always", "away", "something", "fact", "water", "though",
      "less", "public", "put", "think", "almost", "hand", "enough", "far",
      "took", "head", "yet", "government", "system", "better", "set", "told",
      "nothing", "night", "end", "why", "called", "didn", "eyes", "find",
      "going", "look", "asked", "later", "point", "knew", "next", "city",
      "business", "program", "give", "group", "toward", "young", "days", "let",
      "room", "side", "social", "given", "order", "national", "second",
      "possible", "rather", "per", "face", "among", "form", "important",
      "often", "things", "looked", "early", "white", "case", "become", "large",
      "need", "big", "four", "within", "felt", "along", "children", "saw",
      "best", "church", "ever", "least", "power", "development", "light",
      "thing", "family", "interest", "want", "members", "others", "although",
      "turned", "done", "open", "god", "service", "certain", "kind", "began",
      "different", "door", "thus", "help", "means", "sense", "whole", "matter",
      "perhaps", "itself", "york", "times", "human", "line", "information",
      "above", "name", "example", "action", "company", "hands", "local",
      "show", "five", "history", "whether", "gave", "today", "either", "act",
      "feet", "across", "quite", "taken", "anything", "seen", "having", "death",
      "experience", "body", "word", "really", "class", "already", "mind",
      "question", "area", "money", "words", "tell", "keep", "follow", "field",
      "problem", "free", "seemed", "hard", "car", "law", "available", "french",
      "study", "result", "together", "close", "several", "persons", "feel",
      "process", "moment", "mother", "air", "making", "themselves", "john",
      "major", "cannot", "change", "full", "play", "common", "value",
      "believe", "wife", "level", "able", "effect", "strong", "various",
      "certainly", "economic", "week", "including", "real", "nature",
      "provide", "special", "simply", "reason", "idea", "future", "leave",
      "present", "force", "past", "usually", "known", "woman", "position",
      "plan", "cost", "food", "amount", "else", "education", "using", "energy",
      "research", "growth", "music", "report", "rate", "support", "summer",
      "paper", "purpose", "direction", "knowledge", "clearly", "design",
      "building", "particular", "society", "lives", "approach", "spring",
      "student", "road", "model", "creative", "needs", "vital", "bridge",
      "garden", "ocean", "market", "training", "context", "ancient", "modern",
      "pattern", "journey", "practice", "balance", "memory", "climate",
      "culture", "language", "method", "nations", "wisdom", "farmers",
      "community", "structure", "material", "evidence", "planet", "species",
      "careful", "habits", "stories", "readers", "writers", "drawing",
      "teachers", "science", "curious", "steady", "natural", "simple",
      "shared", "travel", "learn", "skill", "craft", "focus", "depth",
      "scale", "range", "flow", "shape", "sound", "color", "space", "stone",
      "river", "mountain", "forest", "valley", "weather", "morning",
      "evening", "winter", "autumn", "harvest", "village", "window",
      "kitchen", "library", "teacher", "mentor", "doctor", "farmer",
      "builder", "painter", "writer", "reader", "walker", "runner",
  };
  return words;
}

const corpus::FrequencyTable& filler_vocab() {
  static const corpus::FrequencyTable table = [] {
    corpus::FrequencyTable t;
    const auto& words = filler_words();
    for (std::size_t rank = 0; rank < words.size(); ++rank) {
      std::uint64_t weight = 20000 / (rank + 1);
      if (weight == 0) weight = 1;
      t.add(std::string(words[rank]), weight);
    }
    return t;
  }();
  return table;
}

const std::vector<std::string_view>& watermark_pool() {
  static const std::vector<std::string_view> pool = {
      "biotechnology", "chronos", "petrichor", "zephyr", "halcyon",
      "obsidian", "vermilion", "chiaroscuro", "susurrus", "peregrine",
      "labyrinthine", "quixotic", "ephemeris", "aurelian", "borealis",
      "cerulean", "diaphanous", "eigengrau", "fulgurite", "gossamer",
      "heliotrope", "incandescence", "juxtaposition", "kaleidoscope",
      "luminescence", "mellifluous", "nebulosity", "oscillation",
      "palimpsest", "quintessence", "resplendent", "serendipity",
      "tessellation", "umbra", "verdigris", "wanderlust", "xenolith",
      "ylem", "zenith", "apogee", "brume", "cynosure", "demesne",
      "effulgence", "firmament", "grimoire", "hinterland", "isthmus",
      "jacaranda", "katabatic", "lacustrine", "meridian", "noctilucent",
      "orrery", "pellucid", "quicksilver", "rhizome", "solstice",
      "thalassic", "undulation", "vestibule", "whorl", "xeric",
      "yardang", "zephyrine", "amaranthine", "bioluminescence",
      "crepuscular", "dendrite", "estuary", "foliage", "geode",
      "hoarfrost", "inselberg", "jetsam", "karst", "lichen", "moraine",
      "nacre", "oxbow", "permafrost", "quagmire", "riparian", "scree",
      "tundra", "uplift", "ventifact", "waterspout", "xylem",
      "catalysis", "dynamo", "entropy", "flux", "gyroscope",
      "harmonic", "inertia", "joule", "kinetics", "lattice",
      "momentum", "neutrino", "optics", "photon", "quanta",
      "resonance", "spectrum", "torque", "vector", "wavelength",
      "alchemy", "basilica", "codex", "dirigible", "epoch",
      "fresco", "gargoyle", "hieroglyph", "incunabula", "jousting",
      "keystone", "lodestar", "mosaic", "nomad", "oracle",
      "parchment", "quill", "relic", "scroll", "talisman",
      "café au lait", "temporal allocation", "quantum tapestry",
      "crystalline lattice", "aurora borealis", "terra incognita",
      "prima facie", "magnum opus", "sotto voce", "deus ex machina",
      "carte blanche", "alma mater", "bona fide", "status quo ante",
  };
  return pool;
}

const std::vector<std::string_view>& query_topics() {
  static const std::vector<std::string_view> topics = {
      "photosynthesis", "gravity", "inflation", "recycling", "chess",
      "volcanoes", "meditation", "databases", "sailing", "nutrition",
      "glaciers", "orchestras", "beekeeping", "cartography", "fermentation",
      "telescopes", "calligraphy", "marathons", "origami", "pottery",
      "astronomy", "genetics", "robotics", "economics", "philosophy",
      "archaeology", "linguistics", "meteorology", "cryptography", "ecology",
      "viticulture", "falconry", "metallurgy", "navigation", "printing",
      "irrigation", "architecture", "photography", "animation", "juggling",
      "composting", "knitting", "surfing", "birdwatching", "foraging",
      "woodworking", "astronomy clubs", "city planning", "tide pools",
      "sourdough baking", "rock climbing", "star formation", "coral reefs",
      "wind turbines", "paper making", "ice skating", "map projections",
      "solar panels", "train networks", "night markets",
  };
  return topics;
}

const std::vector<std::string_view>& query_forms() {
  static const std::vector<std::string_view> forms = {
      "why is {TOPIC} important?",
      "tell me about {TOPIC}",
      "how does {TOPIC} work?",
      "what are the main challenges of {TOPIC}?",
      "explain {TOPIC} to a beginner",
      "what is the history of {TOPIC}?",
      "compare {TOPIC} with its alternatives",
      "give practical tips for {TOPIC}",
      "what are common misconceptions about {TOPIC}?",
      "describe the future of {TOPIC}",
      "how did {TOPIC} change over the last century?",
      "what should I read to learn {TOPIC}?",
  };
  return forms;
}

}  // namespace promptshield::wordlists
