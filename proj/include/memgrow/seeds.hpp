#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

namespace memgrow {

enum class PosTag { Noun, Pronoun, Verb, Adj, Adv, Other };

std::string to_string(PosTag tag);

struct TaggedToken {
    std::string surface;
    PosTag pos{PosTag::Other};
    std::size_t index{0};
};

enum class SeedCategory { Subjects, Actions, TemporalMarkers, DegreeModifiers };

constexpr std::array<SeedCategory, 4> kSeedCategories = {
    SeedCategory::Subjects, SeedCategory::Actions, SeedCategory::TemporalMarkers,
    SeedCategory::DegreeModifiers};

std::string to_string(SeedCategory category);
SeedCategory seed_category_from_string(const std::string& name);

struct SeedSet {
    int query_round{0};
    std::map<SeedCategory, std::vector<std::string>> seeds;

    std::size_t category_count() const;  // L_r: number of non-empty categories
    bool empty() const { return category_count() == 0; }
};

class PosTagger {
public:
    virtual ~PosTagger() = default;
    virtual std::vector<TaggedToken> tag(const std::vector<std::string>& tokens) = 0;
};

// Deterministic rule tagger: closed-class lexicon, suffix heuristics,
// numeral-as-noun rule, NOUN as the open-class default.
class RuleTagger : public PosTagger {
public:
    std::vector<TaggedToken> tag(const std::vector<std::string>& tokens) override;
};

// Adapter over pre-tagged `surface<TAB>UPOS` lines from an external tagger.
class ExternalTagger : public PosTagger {
public:
    explicit ExternalTagger(const std::string& tagged_lines);
    std::vector<TaggedToken> tag(const std::vector<std::string>& tokens) override;

private:
    std::vector<TaggedToken> pretagged_;
};

PosTag upos_to_tag(const std::string& upos);

std::vector<TaggedToken> tag_query(const std::string& query, PosTagger& tagger);

bool is_temporal_marker(const std::string& token);

SeedSet build_seeds(const std::vector<TaggedToken>& tagged, int query_round = 0);

}  // namespace memgrow
