#include "reformcause/features.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "reformcause/error.hpp"

namespace reformcause {

using nlohmann::json;
using textops::CorrectionType;

std::string_view to_string(Family f) {
    switch (f) {
    case Family::Session: return "session";
    case Family::Reformulation: return "reformulation";
    case Family::Asr: return "asr";
    case Family::Nlu: return "nlu";
    case Family::Lg: return "lg";
    }
    return "session";
}

Family family_from_string(std::string_view s) {
    for (Family f : kAllFamilies)
        if (s == to_string(f)) return f;
    throw ConfigError("unknown feature family \"" + std::string(s) + "\"");
}

std::set<Family> parse_family_list(std::string_view csv) {
    std::set<Family> out;
    if (csv == "all") {
        out.insert(kAllFamilies.begin(), kAllFamilies.end());
        return out;
    }
    std::size_t pos = 0;
    while (pos <= csv.size()) {
        std::size_t comma = csv.find(',', pos);
        std::string_view item = csv.substr(pos, comma == std::string_view::npos ? csv.size() - pos
                                                                                : comma - pos);
        std::size_t b = item.find_first_not_of(" \t");
        std::size_t e = item.find_last_not_of(" \t");
        if (b != std::string_view::npos) out.insert(family_from_string(item.substr(b, e - b + 1)));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    if (out.empty()) throw ConfigError("empty family list");
    return out;
}

std::string_view to_string(DialogAct a) {
    switch (a) {
    case DialogAct::Praise: return "praise";
    case DialogAct::Thanking: return "thanking";
    case DialogAct::Backchannel: return "backchannel";
    case DialogAct::Accept: return "accept";
    case DialogAct::Abuse: return "abuse";
    case DialogAct::Reject: return "reject";
    case DialogAct::Idu: return "idu";
    }
    return "praise";
}

std::string_view display_name(DialogAct a) {
    switch (a) {
    case DialogAct::Praise: return "Praise";
    case DialogAct::Thanking: return "Thanking";
    case DialogAct::Backchannel: return "Backchannel";
    case DialogAct::Accept: return "Accept";
    case DialogAct::Abuse: return "Abuse";
    case DialogAct::Reject: return "Reject";
    case DialogAct::Idu: return "IDU";
    }
    return "Praise";
}

DialogAct dialog_act_from_string(std::string_view s) {
    for (DialogAct a : kDialogActs)
        if (s == to_string(a)) return a;
    throw ConfigError("unknown dialog act \"" + std::string(s) + "\"");
}

FeatureSpaceConfig default_space_config() {
    FeatureSpaceConfig c;
    c.intents = {"weather",        "search", "app_launch", "chat",
                 "device_control", "sing_song", "dictionary", "alarm"};
    c.dialog_acts = {
        {DialogAct::Praise, {"wow", "great", "awesome", "well done"}},
        {DialogAct::Thanking, {"thanks", "thank you"}},
        {DialogAct::Backchannel, {"i see", "yeah", "uh huh"}},
        {DialogAct::Accept, {"exactly", "that's right", "yes exactly"}},
        {DialogAct::Abuse, {"shut up", "stupid", "damn"}},
        {DialogAct::Reject, {"not like that", "no way", "that's wrong"}},
        {DialogAct::Idu, {"what do you mean", "i don't understand", "makes no sense"}},
    };
    c.families.insert(kAllFamilies.begin(), kAllFamilies.end());
    return c;
}

FeatureSpaceConfig space_config_from_json(const json& j) {
    FeatureSpaceConfig c = default_space_config();
    if (!j.is_object()) throw ConfigError("feature-space config must be a JSON object");
    if (auto it = j.find("intents"); it != j.end()) {
        c.intents = it->get<std::vector<std::string>>();
    }
    if (auto it = j.find("dialog_acts"); it != j.end()) {
        c.dialog_acts.clear();
        for (DialogAct a : kDialogActs) c.dialog_acts[a] = {};
        for (auto& [key, phrases] : it->items()) {
            c.dialog_acts[dialog_act_from_string(key)] = phrases.get<std::vector<std::string>>();
        }
    }
    if (auto it = j.find("families"); it != j.end()) {
        c.families.clear();
        for (const auto& f : *it) c.families.insert(family_from_string(f.get<std::string>()));
    }
    return c;
}

FeatureSpaceConfig load_space_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open feature-space config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("bad feature-space config " + path.string() + ": " + e.what());
    }
    return space_config_from_json(j);
}

json space_config_to_json(const FeatureSpaceConfig& config) {
    json j;
    j["intents"] = config.intents;
    json acts = json::object();
    for (const auto& [a, phrases] : config.dialog_acts) acts[std::string(to_string(a))] = phrases;
    j["dialog_acts"] = acts;
    std::vector<std::string> fams;
    for (Family f : kAllFamilies)
        if (config.families.count(f)) fams.emplace_back(to_string(f));
    j["families"] = fams;
    return j;
}

namespace {

std::string lower_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        if (static_cast<unsigned char>(c) < 0x80) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string trim(std::string_view s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

} // namespace

FeatureSpace FeatureSpace::build(FeatureSpaceConfig config) {
    if (config.intents.empty()) throw ConfigError("intent vocabulary is empty");
    if (config.families.empty()) throw ConfigError("no feature families enabled");
    if (!config.tokenizer) config.tokenizer = [](std::string_view s) { return textops::tokenize(s); };

    FeatureSpace space;
    for (std::size_t i = 0; i < config.intents.size(); ++i) {
        if (config.intents[i].empty()) throw ConfigError("empty intent label in vocabulary");
        if (!space.intent_index_.emplace(config.intents[i], i).second)
            throw ConfigError("duplicate intent \"" + config.intents[i] + "\" in vocabulary");
    }
    for (DialogAct a : kDialogActs) {
        auto it = config.dialog_acts.find(a);
        std::vector<std::string> lowered;
        if (it != config.dialog_acts.end()) {
            for (const std::string& p : it->second) {
                std::string lp = lower_ascii(trim(p));
                if (!lp.empty()) lowered.push_back(std::move(lp));
            }
        }
        space.lexicon_lower_[a] = std::move(lowered);
    }

    auto add = [&space](Family f, std::string name, bool binary) {
        space.entries_.push_back({std::move(name), f, binary});
    };
    auto add_pair = [&add](Family f, const std::string& base, bool binary) {
        add(f, base + "_u1", binary);
        add(f, base + "_u2", binary);
    };

    if (config.families.count(Family::Session)) {
        add_pair(Family::Session, "CharLen", false);
        add_pair(Family::Session, "WordLen", false);
        add_pair(Family::Session, "InputType", true);
        add(Family::Session, "Interval", false);
    }
    if (config.families.count(Family::Reformulation)) {
        add(Family::Reformulation, "EditDistance", false);
        for (CorrectionType t : {CorrectionType::Add, CorrectionType::Omit, CorrectionType::Par,
                                 CorrectionType::Other})
            add(Family::Reformulation, "Correction(" + std::string(textops::to_string(t)) + ")", true);
        add(Family::Reformulation, "CommonWords", false);
        add(Family::Reformulation, "Voice2Text", true);
        add(Family::Reformulation, "Text2Voice", true);
    }
    if (config.families.count(Family::Asr)) {
        add_pair(Family::Asr, "ASRConf", false);
        add_pair(Family::Asr, "VoiceLen", false);
    }
    if (config.families.count(Family::Nlu)) {
        add(Family::Nlu, "SameIntent", true);
        add(Family::Nlu, "DifferentIntent", true);
        add(Family::Nlu, "DifferentSlot", true);
        for (const std::string& intent : config.intents)
            add_pair(Family::Nlu, "IntentType(" + intent + ")", true);
    }
    if (config.families.count(Family::Lg)) {
        for (DialogAct a : kDialogActs)
            add_pair(Family::Lg, "DialogAct(" + std::string(display_name(a)) + ")", true);
    }

    space.config_ = std::move(config);
    return space;
}

std::vector<std::string> FeatureSpace::feature_names() const {
    std::vector<std::string> names;
    names.reserve(entries_.size());
    for (const FeatureEntry& e : entries_) names.push_back(e.name);
    return names;
}

FeatureVector FeatureSpace::extract(const ExchangeRecord& rec) const {
    FeatureVector v;
    v.reserve(entries_.size());
    const Tokenizer& tok = config_.tokenizer;
    const textops::TokenSequence t1 = tok(rec.u1.text);
    const textops::TokenSequence t2 = tok(rec.u2.text);

    auto intent_idx = [this, &rec](const Utterance& u) {
        auto it = intent_index_.find(u.intent);
        if (it == intent_index_.end())
            throw ValidationError("record " + rec.id + ": intent \"" + u.intent +
                                  "\" is not in the configured vocabulary");
        return it->second;
    };
    auto contains_phrase = [this](const Utterance& u, DialogAct a) {
        const std::string text = lower_ascii(trim(u.text));
        for (const std::string& phrase : lexicon_lower_.at(a))
            if (text.find(phrase) != std::string::npos) return 1.0;
        return 0.0;
    };

    if (has_family(Family::Session)) {
        v.push_back(static_cast<double>(textops::char_length(rec.u1.text)));
        v.push_back(static_cast<double>(textops::char_length(rec.u2.text)));
        v.push_back(static_cast<double>(t1.tokens.size()));
        v.push_back(static_cast<double>(t2.tokens.size()));
        v.push_back(rec.u1.input_type == InputType::Text ? 1.0 : 0.0);
        v.push_back(rec.u2.input_type == InputType::Text ? 1.0 : 0.0);
        v.push_back(std::min(interval_seconds(rec), 1800.0));
    }
    if (has_family(Family::Reformulation)) {
        v.push_back(textops::normalized_edit_distance(rec.u1.text, rec.u2.text));
        const CorrectionType ct = textops::classify_correction(textops::word_diff(t1, t2));
        for (CorrectionType t : {CorrectionType::Add, CorrectionType::Omit, CorrectionType::Par,
                                 CorrectionType::Other})
            v.push_back(ct == t ? 1.0 : 0.0);
        v.push_back(static_cast<double>(textops::common_word_count(t1, t2)));
        v.push_back(rec.u1.input_type == InputType::Voice && rec.u2.input_type == InputType::Text
                        ? 1.0 : 0.0);
        v.push_back(rec.u1.input_type == InputType::Text && rec.u2.input_type == InputType::Voice
                        ? 1.0 : 0.0);
    }
    if (has_family(Family::Asr)) {
        v.push_back(rec.u1.asr_confidence.value_or(0.0));
        v.push_back(rec.u2.asr_confidence.value_or(0.0));
        v.push_back(rec.u1.voice_len_s.value_or(0.0));
        v.push_back(rec.u2.voice_len_s.value_or(0.0));
    }
    if (has_family(Family::Nlu)) {
        const bool same = rec.u1.intent == rec.u2.intent;
        v.push_back(same ? 1.0 : 0.0);
        v.push_back(same ? 0.0 : 1.0);
        v.push_back(rec.u1.slots != rec.u2.slots ? 1.0 : 0.0);
        const std::size_t i1 = intent_idx(rec.u1);
        const std::size_t i2 = intent_idx(rec.u2);
        for (std::size_t i = 0; i < config_.intents.size(); ++i) {
            v.push_back(i == i1 ? 1.0 : 0.0);
            v.push_back(i == i2 ? 1.0 : 0.0);
        }
    }
    if (has_family(Family::Lg)) {
        for (DialogAct a : kDialogActs) {
            v.push_back(contains_phrase(rec.u1, a));
            v.push_back(contains_phrase(rec.u2, a));
        }
    }

    for (double x : v)
        if (!std::isfinite(x))
            throw ValidationError("record " + rec.id + ": non-finite feature value");
    return v;
}

FeatureSpace build_feature_space(FeatureSpaceConfig config) {
    return FeatureSpace::build(std::move(config));
}

FeatureVector extract_features(const ExchangeRecord& rec, const FeatureSpace& space) {
    return space.extract(rec);
}

Standardizer fit_standardizer(const std::vector<FeatureVector>& vectors, const FeatureSpace& space) {
    if (vectors.empty()) throw ValidationError("cannot fit standardizer on an empty set");
    const std::size_t dim = space.size();
    for (const FeatureVector& v : vectors)
        if (v.size() != dim)
            throw ValidationError("feature vector length does not match the feature space");

    Standardizer s;
    s.mean.assign(dim, 0.0);
    s.stddev.assign(dim, 1.0);
    s.passthrough.assign(dim, false);
    const double n = static_cast<double>(vectors.size());
    for (std::size_t j = 0; j < dim; ++j) {
        if (space.entries()[j].binary) {
            s.passthrough[j] = true;
            continue;
        }
        double mean = 0.0;
        for (const FeatureVector& v : vectors) mean += v[j];
        mean /= n;
        double var = 0.0;
        for (const FeatureVector& v : vectors) {
            const double d = v[j] - mean;
            var += d * d;
        }
        var /= n;
        s.mean[j] = mean;
        s.stddev[j] = var > 0.0 ? std::sqrt(var) : 1.0;
    }
    return s;
}

FeatureVector apply_standardizer(const Standardizer& std_, const FeatureVector& v) {
    if (v.size() != std_.mean.size())
        throw ValidationError("feature vector length does not match the standardizer");
    FeatureVector out(v.size());
    for (std::size_t j = 0; j < v.size(); ++j)
        out[j] = std_.passthrough[j] ? v[j] : (v[j] - std_.mean[j]) / std_.stddev[j];
    return out;
}

json standardizer_to_json(const Standardizer& s) {
    json j;
    j["mean"] = s.mean;
    j["stddev"] = s.stddev;
    std::vector<int> pass;
    pass.reserve(s.passthrough.size());
    for (bool b : s.passthrough) pass.push_back(b ? 1 : 0);
    j["passthrough"] = pass;
    return j;
}

Standardizer standardizer_from_json(const json& j) {
    Standardizer s;
    s.mean = j.at("mean").get<std::vector<double>>();
    s.stddev = j.at("stddev").get<std::vector<double>>();
    for (int b : j.at("passthrough").get<std::vector<int>>()) s.passthrough.push_back(b != 0);
    if (s.mean.size() != s.stddev.size() || s.mean.size() != s.passthrough.size())
        throw ParseError("inconsistent standardizer arrays");
    return s;
}

} // namespace reformcause
