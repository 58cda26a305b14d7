#include "reformcause/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "reformcause/error.hpp"
#include "reformcause/rng.hpp"

namespace reformcause {

using nlohmann::json;
using textops::CorrectionType;
using textops::TokenSequence;

namespace {

constexpr std::int64_t kBaseTimestampMs = 1464739200000LL;  // 2016-06-01T00:00:00Z
constexpr std::int64_t kRecordSpacingMs = 3600000LL;

constexpr std::array<CorrectionType, 4> kCorrectionOrder = {
    CorrectionType::Add, CorrectionType::Omit, CorrectionType::Par, CorrectionType::Other};

// Switch columns: V2V, T2T, V2T, T2V.
constexpr std::array<std::pair<InputType, InputType>, 4> kSwitchPairs = {{
    {InputType::Voice, InputType::Voice},
    {InputType::Text, InputType::Text},
    {InputType::Voice, InputType::Text},
    {InputType::Text, InputType::Voice},
}};

std::vector<std::string> split_ws(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == ' ') {
            if (!cur.empty()) out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

UtteranceTemplate tpl(std::string intent, std::string_view text,
                      std::map<std::string, std::string> slots = {}) {
    return {std::move(intent), split_ws(text), std::move(slots)};
}

PhraseBank default_bank() {
    PhraseBank b;
    b.templates = {
        tpl("weather", "what's the weather today", {{"date", "today"}}),
        tpl("weather", "what's the weather in tokyo today", {{"city", "tokyo"}, {"date", "today"}}),
        tpl("weather", "will it rain tomorrow", {{"date", "tomorrow"}}),
        tpl("weather", "show me the weather report for osaka", {{"city", "osaka"}}),
        tpl("weather", "how hot is it outside today", {{"date", "today"}}),
        tpl("weather", "do i need an umbrella tomorrow", {{"date", "tomorrow"}}),
        tpl("weather", "what's the temperature in nagoya", {{"city", "nagoya"}}),
        tpl("search", "search for cat pictures", {{"query", "cat"}}),
        tpl("search", "search for the age of obama", {{"query", "obama"}}),
        tpl("search", "show me pictures of strawberry wallpaper", {{"query", "strawberry"}}),
        tpl("search", "look up the nearest train station", {{"query", "train"}}),
        tpl("search", "search for cheap flights to sapporo", {{"query", "sapporo"}}),
        tpl("search", "find a recipe for curry rice", {{"query", "curry"}}),
        tpl("search", "search for soccer match results", {{"query", "soccer"}}),
        tpl("app_launch", "open the camera app", {{"app", "camera"}}),
        tpl("app_launch", "launch the music player", {{"app", "music"}}),
        tpl("app_launch", "open my calendar now", {{"app", "calendar"}}),
        tpl("app_launch", "start the timer app", {{"app", "timer"}}),
        tpl("app_launch", "open the map application", {{"app", "map"}}),
        tpl("app_launch", "launch the photo gallery", {{"app", "gallery"}}),
        tpl("chat", "tell me a joke"),
        tpl("chat", "say something funny"),
        tpl("chat", "how are you doing"),
        tpl("chat", "what's your name"),
        tpl("chat", "tell me your name"),
        tpl("chat", "do you like ramen"),
        tpl("chat", "talk to me for a while"),
        tpl("chat", "how old are you"),
        tpl("chat", "let's chat about movies"),
        tpl("chat", "tell me something interesting"),
        tpl("device_control", "turn on the wifi", {{"setting", "wifi"}}),
        tpl("device_control", "turn off the bluetooth", {{"setting", "bluetooth"}}),
        tpl("device_control", "turn up the volume", {{"setting", "volume"}}),
        tpl("device_control", "turn on the flashlight", {{"setting", "flashlight"}}),
        tpl("device_control", "mute the sound now", {{"setting", "sound"}}),
        tpl("device_control", "lower the screen brightness", {{"setting", "brightness"}}),
        tpl("sing_song", "sing me a song"),
        tpl("sing_song", "sing your favorite song"),
        tpl("sing_song", "sing a happy birthday song"),
        tpl("sing_song", "sing that song one more time"),
        tpl("dictionary", "what does serendipity mean", {{"word", "serendipity"}}),
        tpl("dictionary", "define the word ephemeral", {{"word", "ephemeral"}}),
        tpl("dictionary", "how do you spell necessary", {{"word", "necessary"}}),
        tpl("dictionary", "what is the meaning of ubiquitous", {{"word", "ubiquitous"}}),
        tpl("dictionary", "look up the definition of paradigm", {{"word", "paradigm"}}),
        tpl("alarm", "set an alarm for seven", {{"time", "seven"}}),
        tpl("alarm", "wake me up at six thirty", {{"time", "six"}}),
        tpl("alarm", "set a timer for ten minutes", {{"duration", "ten"}}),
        tpl("alarm", "cancel my morning alarm", {{"time", "morning"}}),
        tpl("alarm", "remind me to buy milk at five", {{"time", "five"}}),
    };
    b.addon_runs = {split_ws("today"),   split_ws("now"),        split_ws("please"),
                    split_ws("again"),   split_ws("for me"),     split_ws("in tokyo"),
                    split_ws("in osaka"), split_ws("this time"), split_ws("one more time"),
                    split_ws("quickly")};
    b.replacement_runs = {split_ws("forecast"),   split_ws("conditions"), split_ws("tonight"),
                          split_ws("this evening"), split_ws("right away"), split_ws("once more"),
                          split_ws("instead"),    split_ws("differently"), split_ws("downtown"),
                          split_ws("nearby")};
    b.frustration_runs = {split_ws("not like that"),    split_ws("no way"),
                          split_ws("that's wrong"),     split_ws("what do you mean"),
                          split_ws("i don't understand"), split_ws("shut up")};
    b.gratitude_runs = {split_ws("thanks"), split_ws("thank you"), split_ws("wow great"),
                        split_ws("awesome")};
    b.slot_alternatives = {
        {"today", {"tomorrow", "sunday"}},
        {"tomorrow", {"today", "monday"}},
        {"tokyo", {"osaka", "kyoto"}},
        {"osaka", {"tokyo", "nara"}},
        {"nagoya", {"sapporo", "tokyo"}},
        {"sapporo", {"tokyo", "osaka"}},
        {"cat", {"dog", "panda"}},
        {"obama", {"lincoln"}},
        {"strawberry", {"lemon", "peach"}},
        {"train", {"bus"}},
        {"curry", {"ramen"}},
        {"soccer", {"baseball"}},
        {"camera", {"video"}},
        {"music", {"podcast"}},
        {"calendar", {"notes"}},
        {"timer", {"stopwatch"}},
        {"map", {"navigation"}},
        {"gallery", {"album"}},
        {"wifi", {"bluetooth"}},
        {"bluetooth", {"wifi"}},
        {"volume", {"brightness"}},
        {"flashlight", {"lamp"}},
        {"sound", {"volume"}},
        {"brightness", {"contrast"}},
        {"serendipity", {"altruism"}},
        {"ephemeral", {"ethereal"}},
        {"necessary", {"necessity"}},
        {"ubiquitous", {"ambiguous"}},
        {"paradigm", {"paradox"}},
        {"seven", {"eight", "nine"}},
        {"six", {"seven"}},
        {"ten", {"five", "twenty"}},
        {"morning", {"evening"}},
        {"five", {"six", "four"}},
    };
    return b;
}

std::array<double, 4> normalized_row(std::array<double, 4> row, const char* what) {
    double sum = 0.0;
    for (double v : row) {
        if (v < 0.0) throw ConfigError(std::string(what) + ": negative probability");
        sum += v;
    }
    if (sum <= 0.0) throw ConfigError(std::string(what) + ": distribution sums to zero");
    for (double& v : row) v /= sum;
    return row;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
    std::string out;
    for (const std::string& t : tokens) {
        if (!out.empty()) out.push_back(' ');
        out += t;
    }
    return out;
}

std::string action_for_intent(const std::string& intent) {
    if (intent == "weather") return "weather_info";
    if (intent == "search") return "web_search";
    if (intent == "app_launch") return "app_launch";
    if (intent == "chat") return "chat_reply";
    if (intent == "device_control") return "device_control";
    if (intent == "sing_song") return "sing_song";
    if (intent == "dictionary") return "dictionary_lookup";
    if (intent == "alarm") return "set_alarm";
    return "other";
}

} // namespace

SynthConfig default_config() {
    SynthConfig c;
    c.label_priors = normalized_row({38.7, 31.7, 17.3, 5.1}, "label_priors");
    // Correction rows: ADD, OMIT, PAR, OTHER per label.
    c.correction_dist = {
        normalized_row({27.1, 7.2, 58.1, 7.4}, "correction_dist"),
        normalized_row({7.5, 6.0, 74.2, 12.3}, "correction_dist"),
        normalized_row({27.9, 19.8, 41.9, 10.5}, "correction_dist"),
        normalized_row({23.5, 19.6, 47.1, 9.8}, "correction_dist"),
    };
    // Switch rows: V2V, T2T, V2T, T2V per label.
    c.switch_dist = {
        normalized_row({75.2, 23.5, 1.3, 0.0}, "switch_dist"),
        normalized_row({94.6, 0.0, 5.4, 0.0}, "switch_dist"),
        normalized_row({70.5, 23.8, 1.7, 4.6}, "switch_dist"),
        normalized_row({76.5, 23.5, 0.0, 0.0}, "switch_dist"),
    };
    c.asr_conf_params = {AsrConfParams{0.85, 0.10}, AsrConfParams{0.35, 0.15},
                         AsrConfParams{0.82, 0.12}, AsrConfParams{0.85, 0.10}};
    c.bank = default_bank();
    return c;
}

void validate_config(const SynthConfig& config) {
    if (config.n < 0) throw ConfigError("synth: n must be non-negative");
    auto check_row = [](const std::array<double, 4>& row, const char* what) {
        double sum = 0.0;
        for (double v : row) {
            if (v < 0.0 || v > 1.0) throw ConfigError(std::string(what) + ": probability out of [0,1]");
            sum += v;
        }
        if (std::fabs(sum - 1.0) > 1e-9)
            throw ConfigError(std::string(what) + ": distribution does not sum to 1");
    };
    check_row(config.label_priors, "label_priors");
    for (std::size_t l = 0; l < 4; ++l) {
        check_row(config.correction_dist[l], "correction_dist");
        check_row(config.switch_dist[l], "switch_dist");
        if (config.asr_conf_params[l].spread < 0.0)
            throw ConfigError("asr_conf_params: negative spread");
    }
    if (config.bank.templates.empty()) throw ConfigError("phrase bank has no templates");
    bool has_chat = false, has_non_chat = false;
    for (const UtteranceTemplate& t : config.bank.templates) {
        if (t.tokens.size() < 3)
            throw ConfigError("template \"" + join_tokens(t.tokens) + "\" has fewer than 3 tokens");
        const TokenSequence retok = textops::tokenize(join_tokens(t.tokens));
        if (retok.tokens != t.tokens)
            throw ConfigError("template \"" + join_tokens(t.tokens) +
                              "\" does not round-trip through the tokenizer");
        for (const auto& [name, value] : t.slots) {
            if (std::find(t.tokens.begin(), t.tokens.end(), value) == t.tokens.end())
                throw ConfigError("template slot value \"" + value + "\" is not a template token");
        }
        (t.intent == "chat" ? has_chat : has_non_chat) = true;
    }
    if (!has_chat) throw ConfigError("phrase bank needs at least one chat template");
    if (!has_non_chat) throw ConfigError("phrase bank needs at least one non-chat template");
    if (config.bank.addon_runs.empty() || config.bank.replacement_runs.empty() ||
        config.bank.frustration_runs.empty() || config.bank.gratitude_runs.empty())
        throw ConfigError("phrase bank run pools must be non-empty");
}

namespace {

class Generator {
public:
    Generator(const SynthConfig& config)
        : cfg_(config), rng_(derive_seed(config.seed, "synth")) {
        for (const UtteranceTemplate& t : cfg_.bank.templates) {
            if (t.intent == "chat")
                chat_templates_.push_back(&t);
            else
                other_templates_.push_back(&t);
        }
    }

    Corpus run() {
        Corpus corpus;
        for (int i = 0; i < cfg_.n; ++i) corpus.records.push_back(make_record(i));
        std::ostringstream note;
        note << "synth generated n=" << cfg_.n << " seed=" << cfg_.seed;
        corpus.provenance.push_back(note.str());
        return corpus;
    }

private:
    struct PairBuild {
        std::vector<std::string> u1_tokens;
        std::vector<std::string> u2_tokens;
        bool slot_swapped = false;
        std::string swapped_name;
        std::string swapped_value;
        bool phrase_in_u2 = false;
    };

    const SynthConfig& cfg_;
    Rng rng_;
    std::vector<const UtteranceTemplate*> chat_templates_;
    std::vector<const UtteranceTemplate*> other_templates_;

    static std::vector<double> to_vec(const std::array<double, 4>& a) {
        return {a[0], a[1], a[2], a[3]};
    }

    std::string corrupt_token(const std::string& tok) {
        static const char letters[] = "abcdefghijklmnopqrstuvwxyz";
        std::string out = tok;
        for (int guard = 0; guard < 32 && out == tok; ++guard) {
            out = tok;
            const int edits = 1 + static_cast<int>(rng_.index(2));
            for (int e = 0; e < edits; ++e) {
                const std::size_t op = rng_.index(3);
                if (op == 0) {
                    out[rng_.index(out.size())] = letters[rng_.index(26)];
                } else if (op == 1 && out.size() > 1) {
                    out.erase(rng_.index(out.size()), 1);
                } else {
                    out.insert(out.begin() + static_cast<std::ptrdiff_t>(rng_.index(out.size() + 1)),
                               letters[rng_.index(26)]);
                }
            }
        }
        return out;
    }

    const std::vector<std::string>& pick_run(const std::vector<std::vector<std::string>>& pool) {
        return pool[rng_.index(pool.size())];
    }

    /// One construction attempt for the sampled correction type; the caller
    /// verifies the result and retries on failure.
    PairBuild try_build(const UtteranceTemplate& t, CorrectionType correction, CauseLabel label,
                        bool want_phrase, bool want_gratitude, int attempt) {
        const std::vector<std::string>& base = t.tokens;
        PairBuild pb;
        pb.u1_tokens = base;
        pb.u2_tokens = base;
        switch (correction) {
        case CorrectionType::Add: {
            const std::vector<std::string>* run;
            if (want_phrase) {
                run = &pick_run(cfg_.bank.frustration_runs);
                pb.phrase_in_u2 = true;
            } else if (want_gratitude) {
                run = &pick_run(cfg_.bank.gratitude_runs);
                pb.phrase_in_u2 = true;
            } else {
                run = &pick_run(cfg_.bank.addon_runs);
            }
            const std::size_t pos = rng_.index(base.size() + 1);
            pb.u2_tokens.insert(pb.u2_tokens.begin() + static_cast<std::ptrdiff_t>(pos),
                                run->begin(), run->end());
            break;
        }
        case CorrectionType::Omit: {
            std::size_t start, len;
            if (attempt > 20) {
                // fall back to removing the shortest token
                start = 0;
                for (std::size_t i = 1; i < base.size(); ++i)
                    if (base[i].size() < base[start].size()) start = i;
                len = 1;
            } else {
                len = 1 + rng_.index(std::min<std::size_t>(2, base.size() - 1));
                start = rng_.index(base.size() - len + 1);
            }
            pb.u2_tokens.erase(pb.u2_tokens.begin() + static_cast<std::ptrdiff_t>(start),
                               pb.u2_tokens.begin() + static_cast<std::ptrdiff_t>(start + len));
            break;
        }
        case CorrectionType::Par: {
            if (label == CauseLabel::AsrError) {
                // U1 carries the misrecognized run; U2 is the intended text.
                const std::size_t len = 1 + rng_.index(std::min<std::size_t>(2, base.size() - 1));
                const std::size_t start = rng_.index(base.size() - len + 1);
                for (std::size_t i = start; i < start + len; ++i)
                    pb.u1_tokens[i] = corrupt_token(base[i]);
                break;
            }
            if (label == CauseLabel::NoError && !t.slots.empty() &&
                rng_.next_double() < cfg_.knobs.no_error_slot_change_prob) {
                // Re-ask with one slot value swapped.
                std::vector<std::pair<std::string, std::string>> candidates;
                for (const auto& [name, value] : t.slots) {
                    auto alt = cfg_.bank.slot_alternatives.find(value);
                    if (alt == cfg_.bank.slot_alternatives.end() || alt->second.empty()) continue;
                    if (std::count(base.begin(), base.end(), value) == 1)
                        candidates.emplace_back(name, value);
                }
                if (!candidates.empty()) {
                    const auto& [name, value] = candidates[rng_.index(candidates.size())];
                    const auto& alts = cfg_.bank.slot_alternatives.at(value);
                    const std::string& replacement = alts[rng_.index(alts.size())];
                    for (std::string& tok : pb.u2_tokens)
                        if (tok == value) tok = replacement;
                    pb.slot_swapped = true;
                    pb.swapped_name = name;
                    pb.swapped_value = replacement;
                    break;
                }
            }
            const std::vector<std::string>* run;
            if (want_phrase) {
                run = &pick_run(cfg_.bank.frustration_runs);
                pb.phrase_in_u2 = true;
            } else {
                run = &pick_run(cfg_.bank.replacement_runs);
            }
            const std::size_t len = 1 + rng_.index(std::min<std::size_t>(2, base.size() - 1));
            const std::size_t start = rng_.index(base.size() - len + 1);
            pb.u2_tokens.erase(pb.u2_tokens.begin() + static_cast<std::ptrdiff_t>(start),
                               pb.u2_tokens.begin() + static_cast<std::ptrdiff_t>(start + len));
            pb.u2_tokens.insert(pb.u2_tokens.begin() + static_cast<std::ptrdiff_t>(start),
                                run->begin(), run->end());
            break;
        }
        case CorrectionType::Other: {
            // Two separated single-token changes so the diff has two
            // replaced regions with a match between them.
            const std::size_t i = rng_.index(base.size() - 2);
            const std::size_t j = i + 2 + rng_.index(base.size() - i - 2);
            if (label == CauseLabel::AsrError) {
                pb.u1_tokens[i] = corrupt_token(base[i]);
                pb.u1_tokens[j] = corrupt_token(base[j]);
            } else {
                pb.u2_tokens[i] = corrupt_token(base[i]);
                pb.u2_tokens[j] = corrupt_token(base[j]);
            }
            break;
        }
        }
        return pb;
    }

    const UtteranceTemplate& pick_template(CauseLabel label, bool chat) {
        const auto& pool = chat ? chat_templates_ : other_templates_;
        (void)label;
        return *pool[rng_.index(pool.size())];
    }

    std::string wrong_intent(const std::string& correct) {
        // Misunderstandings skew toward web search.
        if (correct != "search" && rng_.next_double() < 0.6) return "search";
        static const std::array<std::string, 8> all = {"weather",        "search",
                                                       "app_launch",     "chat",
                                                       "device_control", "sing_song",
                                                       "dictionary",     "alarm"};
        for (int guard = 0; guard < 64; ++guard) {
            const std::string& cand = all[rng_.index(all.size())];
            if (cand != correct) return cand;
        }
        return correct == "search" ? "weather" : "search";
    }

    ExchangeRecord make_record(int index) {
        const std::size_t label_idx = rng_.categorical(to_vec(cfg_.label_priors));
        const CauseLabel label = kTaskLabels[label_idx];
        const std::size_t switch_idx = rng_.categorical(to_vec(cfg_.switch_dist[label_idx]));
        const std::size_t corr_idx = rng_.categorical(to_vec(cfg_.correction_dist[label_idx]));
        const CorrectionType correction = kCorrectionOrder[corr_idx];

        const bool chat = label == CauseLabel::LgError ||
                          (label == CauseLabel::NoError &&
                           rng_.next_double() < cfg_.knobs.no_error_chat_prob);
        const bool want_phrase = label == CauseLabel::LgError &&
                                 rng_.next_double() < cfg_.knobs.lg_phrase_prob;
        const bool want_gratitude = label == CauseLabel::NoError && chat &&
                                    rng_.next_double() < cfg_.knobs.no_error_phrase_prob;

        const UtteranceTemplate* chosen = nullptr;
        PairBuild pb;
        bool built = false;
        for (int outer = 0; outer < 50 && !built; ++outer) {
            const UtteranceTemplate& t = pick_template(label, chat);
            for (int attempt = 0; attempt < 40; ++attempt) {
                PairBuild cand = try_build(t, correction, label, want_phrase, want_gratitude,
                                           attempt);
                const std::string u1_text = join_tokens(cand.u1_tokens);
                const std::string u2_text = join_tokens(cand.u2_tokens);
                const double d = textops::normalized_edit_distance(u1_text, u2_text);
                if (!(d > 0.0 && d <= 0.5)) continue;
                const TokenSequence t1 = textops::tokenize(u1_text);
                const TokenSequence t2 = textops::tokenize(u2_text);
                if (textops::classify_correction(textops::word_diff(t1, t2)) != correction)
                    continue;
                chosen = &t;
                pb = std::move(cand);
                built = true;
                break;
            }
        }
        if (!built)
            throw GenerationError("phrase bank cannot honor correction type " +
                                  std::string(textops::to_string(correction)) + " for label " +
                                  std::string(to_string(label)));

        ExchangeRecord rec;
        {
            std::ostringstream id;
            id << "synth-";
            id.fill('0');
            id.width(6);
            id << index;
            rec.id = id.str();
        }
        rec.gold_label = label;
        rec.u1.text = join_tokens(pb.u1_tokens);
        rec.u2.text = join_tokens(pb.u2_tokens);

        // Intents and slots.
        const std::string& true_intent = chosen->intent;
        rec.u2.intent = true_intent;
        rec.u2.slots = chosen->slots;
        rec.u1.intent = true_intent;
        rec.u1.slots = chosen->slots;
        switch (label) {
        case CauseLabel::NoError:
            if (pb.slot_swapped) {
                rec.u2.slots[pb.swapped_name] = pb.swapped_value;
            } else if (!chosen->slots.empty() &&
                       rng_.next_double() < cfg_.knobs.no_error_slot_change_prob) {
                mutate_one_slot(rec.u2.slots);
            }
            break;
        case CauseLabel::AsrError:
            if (rng_.next_double() < cfg_.knobs.asr_intent_scramble_prob) {
                rec.u1.intent = wrong_intent(true_intent);
                rec.u1.slots.clear();
            }
            break;
        case CauseLabel::NluError:
            if (chosen->slots.empty() ||
                rng_.next_double() < cfg_.knobs.nlu_intent_error_prob) {
                rec.u1.intent = wrong_intent(true_intent);
                rec.u1.slots.clear();
            } else {
                mutate_one_slot(rec.u1.slots);
            }
            break;
        case CauseLabel::LgError:
            break;
        default:
            break;
        }

        // Input modalities and ASR metadata.
        const auto [type1, type2] = kSwitchPairs[switch_idx];
        rec.u1.input_type = type1;
        rec.u2.input_type = type2;
        if (type1 == InputType::Voice) {
            const AsrConfParams& p = cfg_.asr_conf_params[label_idx];
            rec.u1.asr_confidence = std::clamp(rng_.normal(p.mean, p.spread), 0.0, 1.0);
            rec.u1.voice_len_s = voice_len(pb.u1_tokens.size(), label == CauseLabel::AsrError);
        }
        if (type2 == InputType::Voice) {
            const AsrConfParams& p = cfg_.asr_conf_params[0];  // follow-up recognized normally
            rec.u2.asr_confidence = std::clamp(rng_.normal(p.mean, p.spread), 0.0, 1.0);
            rec.u2.voice_len_s = voice_len(pb.u2_tokens.size(), false);
        }

        // Timing: satisfied users come back later; corrections are quick.
        std::int64_t interval_ms;
        if (label == CauseLabel::NoError) {
            interval_ms = rng_.uniform_int(10000, 1800000);
        } else {
            const double u = rng_.next_double();
            interval_ms = 1 + static_cast<std::int64_t>(-150000.0 * std::log(1.0 - u));
            interval_ms = std::min<std::int64_t>(interval_ms, 1800000);
        }
        rec.u1.timestamp_ms = kBaseTimestampMs + static_cast<std::int64_t>(index) * kRecordSpacingMs;
        rec.u2.timestamp_ms = rec.u1.timestamp_ms + interval_ms;

        // System response acts on whatever intent U1 was recognized as.
        rec.response.action = action_for_intent(rec.u1.intent);
        switch (label) {
        case CauseLabel::NoError: rec.response.text = "here you go"; break;
        case CauseLabel::AsrError: rec.response.text = "here is what i found for " + rec.u1.text; break;
        case CauseLabel::NluError:
            rec.response.text = "here are the search results for " + rec.u1.text;
            break;
        case CauseLabel::LgError: rec.response.text = "i am twenty years old"; break;
        default: rec.response.text = "ok"; break;
        }
        return rec;
    }

    void mutate_one_slot(std::map<std::string, std::string>& slots) {
        if (slots.empty()) return;
        const std::size_t pick = rng_.index(slots.size());
        auto it = slots.begin();
        std::advance(it, static_cast<std::ptrdiff_t>(pick));
        auto alt = cfg_.bank.slot_alternatives.find(it->second);
        if (alt != cfg_.bank.slot_alternatives.end() && !alt->second.empty()) {
            it->second = alt->second[rng_.index(alt->second.size())];
        } else {
            slots.erase(it);
        }
    }

    double voice_len(std::size_t words, bool long_bias) {
        const double base = 0.3 + 0.35 * static_cast<double>(words) + rng_.normal(0.0, 0.15);
        return std::max(0.2, base + (long_bias ? 0.8 : 0.0));
    }
};

} // namespace

Corpus generate_corpus(const SynthConfig& config) {
    validate_config(config);
    return Generator(config).run();
}

namespace {

std::array<double, 4> label_row_from_json(const json& j, const char* what) {
    std::array<double, 4> row{};
    for (std::size_t i = 0; i < kTaskLabels.size(); ++i)
        row[i] = j.at(std::string(to_string(kTaskLabels[i]))).get<double>();
    return normalized_row(row, what);
}

std::array<double, 4> keyed_row_from_json(const json& j, const std::array<const char*, 4>& keys,
                                          const char* what) {
    std::array<double, 4> row{};
    for (std::size_t i = 0; i < keys.size(); ++i) row[i] = j.at(keys[i]).get<double>();
    return normalized_row(row, what);
}

std::vector<std::vector<std::string>> runs_from_json(const json& j) {
    std::vector<std::vector<std::string>> out;
    for (const auto& item : j) out.push_back(split_ws(item.get<std::string>()));
    return out;
}

} // namespace

SynthConfig synth_config_from_json(const json& j) {
    SynthConfig c = default_config();
    if (!j.is_object()) throw ConfigError("synth config must be a JSON object");
    if (auto it = j.find("n"); it != j.end()) c.n = it->get<int>();
    if (auto it = j.find("seed"); it != j.end()) c.seed = it->get<std::uint64_t>();
    if (auto it = j.find("label_priors"); it != j.end())
        c.label_priors = label_row_from_json(*it, "label_priors");
    if (auto it = j.find("correction_dist"); it != j.end()) {
        for (std::size_t l = 0; l < kTaskLabels.size(); ++l) {
            auto row = it->find(std::string(to_string(kTaskLabels[l])));
            if (row != it->end())
                c.correction_dist[l] =
                    keyed_row_from_json(*row, {"ADD", "OMIT", "PAR", "OTHER"}, "correction_dist");
        }
    }
    if (auto it = j.find("switch_dist"); it != j.end()) {
        for (std::size_t l = 0; l < kTaskLabels.size(); ++l) {
            auto row = it->find(std::string(to_string(kTaskLabels[l])));
            if (row != it->end())
                c.switch_dist[l] =
                    keyed_row_from_json(*row, {"V2V", "T2T", "V2T", "T2V"}, "switch_dist");
        }
    }
    if (auto it = j.find("asr_conf"); it != j.end()) {
        for (std::size_t l = 0; l < kTaskLabels.size(); ++l) {
            auto row = it->find(std::string(to_string(kTaskLabels[l])));
            if (row != it->end())
                c.asr_conf_params[l] = {row->at("mean").get<double>(),
                                        row->at("spread").get<double>()};
        }
    }
    if (auto it = j.find("knobs"); it != j.end()) {
        auto get = [&](const char* key, double& out) {
            if (auto k = it->find(key); k != it->end()) out = k->get<double>();
        };
        get("asr_intent_scramble_prob", c.knobs.asr_intent_scramble_prob);
        get("nlu_intent_error_prob", c.knobs.nlu_intent_error_prob);
        get("no_error_slot_change_prob", c.knobs.no_error_slot_change_prob);
        get("no_error_chat_prob", c.knobs.no_error_chat_prob);
        get("lg_phrase_prob", c.knobs.lg_phrase_prob);
        get("no_error_phrase_prob", c.knobs.no_error_phrase_prob);
    }
    if (auto it = j.find("templates"); it != j.end()) {
        c.bank.templates.clear();
        for (const auto& item : *it) {
            UtteranceTemplate t;
            t.intent = item.at("intent").get<std::string>();
            t.tokens = split_ws(item.at("text").get<std::string>());
            if (auto s = item.find("slots"); s != item.end())
                for (auto& [k, v] : s->items()) t.slots[k] = v.get<std::string>();
            c.bank.templates.push_back(std::move(t));
        }
    }
    if (auto it = j.find("addon_runs"); it != j.end()) c.bank.addon_runs = runs_from_json(*it);
    if (auto it = j.find("replacement_runs"); it != j.end())
        c.bank.replacement_runs = runs_from_json(*it);
    if (auto it = j.find("frustration_runs"); it != j.end())
        c.bank.frustration_runs = runs_from_json(*it);
    if (auto it = j.find("gratitude_runs"); it != j.end())
        c.bank.gratitude_runs = runs_from_json(*it);
    validate_config(c);
    return c;
}

SynthConfig load_synth_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open synth config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("bad synth config " + path.string() + ": " + e.what());
    }
    return synth_config_from_json(j);
}

} // namespace reformcause
