#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "reformcause/corpus.hpp"
#include "reformcause/textops.hpp"

namespace reformcause {

/// Feature families. Session and Reformulation form the baseline model;
/// ASR, NLU and LG target the corresponding assistant components.
enum class Family { Session, Reformulation, Asr, Nlu, Lg };

inline constexpr std::array<Family, 5> kAllFamilies = {
    Family::Session, Family::Reformulation, Family::Asr, Family::Nlu, Family::Lg};

std::string_view to_string(Family f);
Family family_from_string(std::string_view s);
std::set<Family> parse_family_list(std::string_view csv);  // "session,reformulation" or "all"

enum class DialogAct { Praise, Thanking, Backchannel, Accept, Abuse, Reject, Idu };

inline constexpr std::array<DialogAct, 7> kDialogActs = {
    DialogAct::Praise, DialogAct::Thanking, DialogAct::Backchannel, DialogAct::Accept,
    DialogAct::Abuse,  DialogAct::Reject,   DialogAct::Idu};

std::string_view to_string(DialogAct a);       // config key: "praise", ..., "idu"
std::string_view display_name(DialogAct a);    // "Praise", ..., "IDU"
DialogAct dialog_act_from_string(std::string_view s);

using Tokenizer = std::function<textops::TokenSequence(std::string_view)>;

struct FeatureSpaceConfig {
    std::vector<std::string> intents;
    std::map<DialogAct, std::vector<std::string>> dialog_acts;
    std::set<Family> families;
    Tokenizer tokenizer;  // defaults to textops::tokenize when empty
};

/// Bundled default: the eight stock intents, a small English dialog-act
/// lexicon, and all five families enabled.
FeatureSpaceConfig default_space_config();

FeatureSpaceConfig space_config_from_json(const nlohmann::json& j);
FeatureSpaceConfig load_space_config(const std::filesystem::path& path);
nlohmann::json space_config_to_json(const FeatureSpaceConfig& config);

struct FeatureEntry {
    std::string name;
    Family family;
    bool binary;
};

using FeatureVector = std::vector<double>;

/// Fixed, ordered feature registry. Entry order is Session, Reformulation,
/// ASR, NLU, LG; per-utterance features appear once per utterance with
/// _u1/_u2 suffixes. Disabled families contribute no entries.
class FeatureSpace {
public:
    static FeatureSpace build(FeatureSpaceConfig config);

    const std::vector<FeatureEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    const FeatureSpaceConfig& config() const { return config_; }
    std::vector<std::string> feature_names() const;
    bool has_family(Family f) const { return config_.families.count(f) != 0; }

    /// Maps a record onto the registry. Throws ValidationError when an
    /// utterance intent is outside the configured vocabulary.
    FeatureVector extract(const ExchangeRecord& rec) const;

private:
    FeatureSpaceConfig config_;
    std::vector<FeatureEntry> entries_;
    std::map<std::string, std::size_t, std::less<>> intent_index_;
    std::map<DialogAct, std::vector<std::string>> lexicon_lower_;
};

FeatureSpace build_feature_space(FeatureSpaceConfig config);
FeatureVector extract_features(const ExchangeRecord& rec, const FeatureSpace& space);

/// Per-entry affine transform fit on a training fold. Binary entries pass
/// through untouched; entries constant on the fit set get stddev 1.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> stddev;
    std::vector<bool> passthrough;

    bool operator==(const Standardizer&) const = default;
};

/// Population (divide-by-n) mean/stddev over the fit set.
Standardizer fit_standardizer(const std::vector<FeatureVector>& vectors, const FeatureSpace& space);
FeatureVector apply_standardizer(const Standardizer& std, const FeatureVector& v);

nlohmann::json standardizer_to_json(const Standardizer& s);
Standardizer standardizer_from_json(const nlohmann::json& j);

} // namespace reformcause
