#include "memgrow/seeds.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <unordered_set>

#include "memgrow/corpus.hpp"
#include "memgrow/errors.hpp"

namespace memgrow {
namespace {

std::string lower(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool all_digits(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(),
                                     [](unsigned char c) { return std::isdigit(c); });
}

const std::unordered_set<std::string>& pronouns() {
    static const std::unordered_set<std::string> set = {
        "i",    "you",   "he",   "she",   "it",    "we",     "they",    "me",
        "him",  "her",   "us",   "them",  "this",  "that",   "these",   "those",
        "who",  "whom",  "what", "which", "whose", "myself", "himself", "herself",
        "itself", "themselves", "someone", "something", "anyone", "anything",
        "everyone", "everything", "nobody", "nothing"};
    return set;
}

// Determiners, prepositions, conjunctions, auxiliaries, particles.
const std::unordered_set<std::string>& closed_class() {
    static const std::unordered_set<std::string> set = {
        "a",      "an",     "the",    "of",      "in",      "on",     "at",     "by",
        "for",    "with",   "to",     "from",    "and",     "or",     "but",    "nor",
        "not",    "no",     "as",     "if",      "then",    "than",   "so",     "because",
        "about",  "into",   "onto",   "over",    "under",   "between", "among", "during",
        "through", "across", "against", "without", "within", "upon",   "up",     "down",
        "out",    "off",    "is",     "am",      "are",     "was",    "were",   "be",
        "been",   "being",  "do",     "does",    "did",     "done",   "have",   "has",
        "had",    "having", "will",   "would",   "shall",   "should", "can",    "could",
        "may",    "might",  "must",   "my",      "your",    "his",    "its",    "our",
        "their",  "hers",   "mine",   "yours",   "ours",    "theirs", "there",  "here",
        "when",   "where",  "why",    "how",     "also",    "both",   "each",   "either",
        "neither", "per",   "via",    "et",      "al"};
    return set;
}

const std::unordered_set<std::string>& verb_stems() {
    static const std::unordered_set<std::string> set = {
        "run",     "ran",     "go",      "went",    "gone",    "goes",    "make",
        "made",    "take",    "took",    "taken",   "get",     "got",     "gotten",
        "say",     "said",    "see",     "saw",     "seen",    "come",    "came",
        "know",    "knew",    "known",   "find",    "found",   "give",    "gave",
        "given",   "tell",    "told",    "think",   "thought", "become",  "became",
        "begin",   "began",   "begun",   "show",    "showed",  "shown",   "hold",
        "held",    "bring",   "brought", "write",   "wrote",   "written", "read",
        "sing",    "sang",    "sung",    "play",    "work",    "live",    "move",
        "use",     "call",    "want",    "need",    "try",     "ask",     "feel",
        "felt",    "leave",   "left",    "put",     "mean",    "meant",   "keep",
        "kept",    "let",     "win",     "won",     "lose",    "lost",    "pay",
        "paid",    "meet",    "met",     "set",     "learn",   "lead",    "led",
        "grow",    "grew",    "grown",   "build",   "built",   "send",    "sent",
        "buy",     "bought",  "sell",    "sold",    "speak",   "spoke",   "spoken",
        "develop", "create",  "produce", "direct",  "release", "publish", "found",
        "voice",   "act",     "star",    "perform", "record",  "compose", "design",
        "invent",  "discover", "establish", "happen", "occur",  "die",     "bear",
        "born",    "marry",   "name",    "base",    "locate",  "serve",   "appear"};
    return set;
}

const std::unordered_set<std::string>& adjectives() {
    static const std::unordered_set<std::string> set = {
        "big",   "small", "large",  "little", "red",    "blue",   "green",  "fast",
        "slow",  "quick", "good",   "bad",    "new",    "old",    "young",  "high",
        "low",   "long",  "short",  "great",  "main",   "major",  "minor",  "early",
        "late",  "first", "last",   "best",   "worst",  "many",   "few",    "several",
        "famous", "popular", "important", "original", "final",   "correct", "wrong",
        "same",  "different", "whole", "full", "recent", "common", "rare",   "deep",
        "wide",  "tall",  "heavy",  "light",  "strong", "weak",   "hot",    "cold"};
    return set;
}

const std::unordered_set<std::string>& temporal_words() {
    static const std::unordered_set<std::string> set = {
        "year",     "years",    "month",   "months",   "week",      "weeks",
        "day",      "days",     "decade",  "decades",  "century",   "centuries",
        "today",    "yesterday", "tomorrow",
        "january",  "february", "march",   "april",    "may",       "june",
        "july",     "august",   "september", "october", "november", "december",
        "monday",   "tuesday",  "wednesday", "thursday", "friday",  "saturday",
        "sunday"};
    return set;
}

bool has_suffix(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// "-ed"/"-ing" counts as a verb only when the stem is a known verb,
// allowing for doubled consonants and dropped final "e".
bool inflected_verb(const std::string& word) {
    for (const std::string& suffix : {std::string("ed"), std::string("ing"), std::string("s"),
                                      std::string("es")}) {
        if (!has_suffix(word, suffix)) continue;
        std::string stem = word.substr(0, word.size() - suffix.size());
        if (verb_stems().count(stem)) return true;
        if (verb_stems().count(stem + "e")) return true;
        if (stem.size() >= 2 && stem[stem.size() - 1] == stem[stem.size() - 2] &&
            verb_stems().count(stem.substr(0, stem.size() - 1)))
            return true;
    }
    return false;
}

bool is_punct_only(const std::string& s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::ispunct(c); });
}

}  // namespace

std::string to_string(PosTag tag) {
    switch (tag) {
        case PosTag::Noun: return "NOUN";
        case PosTag::Pronoun: return "PRONOUN";
        case PosTag::Verb: return "VERB";
        case PosTag::Adj: return "ADJ";
        case PosTag::Adv: return "ADV";
        case PosTag::Other: return "OTHER";
    }
    return "OTHER";
}

std::string to_string(SeedCategory category) {
    switch (category) {
        case SeedCategory::Subjects: return "subjects";
        case SeedCategory::Actions: return "actions";
        case SeedCategory::TemporalMarkers: return "temporal_markers";
        case SeedCategory::DegreeModifiers: return "degree_modifiers";
    }
    return "subjects";
}

SeedCategory seed_category_from_string(const std::string& name) {
    for (SeedCategory category : kSeedCategories)
        if (to_string(category) == name) return category;
    throw DataError("unknown seed category: " + name);
}

std::size_t SeedSet::category_count() const {
    std::size_t n = 0;
    for (const auto& [_, tokens] : seeds)
        if (!tokens.empty()) ++n;
    return n;
}

std::vector<TaggedToken> RuleTagger::tag(const std::vector<std::string>& tokens) {
    std::vector<TaggedToken> out;
    out.reserve(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const std::string& surface = tokens[i];
        std::string word = lower(surface);
        PosTag tag = PosTag::Noun;  // open-class default
        if (is_punct_only(word)) tag = PosTag::Other;
        else if (pronouns().count(word)) tag = PosTag::Pronoun;
        else if (closed_class().count(word)) tag = PosTag::Other;
        else if (all_digits(word)) tag = PosTag::Noun;
        else if (verb_stems().count(word) || inflected_verb(word)) tag = PosTag::Verb;
        else if (adjectives().count(word)) tag = PosTag::Adj;
        else if (has_suffix(word, "ly") && word.size() > 3) tag = PosTag::Adv;
        out.push_back({surface, tag, i});
    }
    return out;
}

PosTag upos_to_tag(const std::string& upos) {
    if (upos == "NOUN" || upos == "PROPN" || upos == "NUM") return PosTag::Noun;
    if (upos == "PRON") return PosTag::Pronoun;
    if (upos == "VERB") return PosTag::Verb;
    if (upos == "ADJ") return PosTag::Adj;
    if (upos == "ADV") return PosTag::Adv;
    return PosTag::Other;  // AUX, DET, ADP, CCONJ, PUNCT, ...
}

ExternalTagger::ExternalTagger(const std::string& tagged_lines) {
    std::istringstream in(tagged_lines);
    std::string line;
    std::size_t index = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw DataError("external tagger line missing TAB: " + line);
        pretagged_.push_back({line.substr(0, tab), upos_to_tag(line.substr(tab + 1)), index});
        ++index;
    }
}

std::vector<TaggedToken> ExternalTagger::tag(const std::vector<std::string>& tokens) {
    if (pretagged_.size() != tokens.size())
        throw DataError("external tagger token count mismatch: got " +
                        std::to_string(pretagged_.size()) + " tags for " +
                        std::to_string(tokens.size()) + " tokens");
    return pretagged_;
}

std::vector<TaggedToken> tag_query(const std::string& query, PosTagger& tagger) {
    std::vector<std::string> tokens = tokenize(query);
    if (tokens.empty()) throw DomainError("tag_query: empty query");
    return tagger.tag(tokens);
}

bool is_temporal_marker(const std::string& token) {
    std::string word = lower(token);
    if (word.size() == 4 && all_digits(word) && word[0] >= '1' && word[0] <= '2') return true;
    return temporal_words().count(word) > 0;
}

SeedSet build_seeds(const std::vector<TaggedToken>& tagged, int query_round) {
    SeedSet set;
    set.query_round = query_round;
    for (const auto& token : tagged) {
        switch (token.pos) {
            case PosTag::Noun:
            case PosTag::Pronoun:
                if (is_temporal_marker(token.surface))
                    set.seeds[SeedCategory::TemporalMarkers].push_back(token.surface);
                else
                    set.seeds[SeedCategory::Subjects].push_back(token.surface);
                break;
            case PosTag::Verb:
                set.seeds[SeedCategory::Actions].push_back(token.surface);
                break;
            case PosTag::Adj:
            case PosTag::Adv:
                set.seeds[SeedCategory::DegreeModifiers].push_back(token.surface);
                break;
            case PosTag::Other:
                break;
        }
    }
    return set;
}

}  // namespace memgrow
