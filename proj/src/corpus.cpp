#include "reformcause/corpus.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "reformcause/error.hpp"
#include "reformcause/textops.hpp"

namespace reformcause {

using nlohmann::json;

std::string_view to_string(InputType t) {
    return t == InputType::Voice ? "voice" : "text";
}

InputType input_type_from_string(std::string_view s) {
    if (s == "voice") return InputType::Voice;
    if (s == "text") return InputType::Text;
    throw ValidationError("unknown input_type \"" + std::string(s) + "\"");
}

bool is_task_label(CauseLabel l) {
    switch (l) {
    case CauseLabel::NoError:
    case CauseLabel::AsrError:
    case CauseLabel::NluError:
    case CauseLabel::LgError:
        return true;
    default:
        return false;
    }
}

std::string_view to_string(CauseLabel l) {
    switch (l) {
    case CauseLabel::NoError: return "no_error";
    case CauseLabel::AsrError: return "asr_error";
    case CauseLabel::NluError: return "nlu_error";
    case CauseLabel::LgError: return "lg_error";
    case CauseLabel::UnsupportedAction: return "unsupported_action";
    case CauseLabel::EndpointError: return "endpoint_error";
    case CauseLabel::UninterpretableInput: return "uninterpretable_input";
    }
    return "no_error";
}

std::string_view display_name(CauseLabel l) {
    switch (l) {
    case CauseLabel::NoError: return "No error";
    case CauseLabel::AsrError: return "ASR error";
    case CauseLabel::NluError: return "NLU error";
    case CauseLabel::LgError: return "LG error";
    case CauseLabel::UnsupportedAction: return "Unsupported action";
    case CauseLabel::EndpointError: return "Endpoint error";
    case CauseLabel::UninterpretableInput: return "Uninterpretable input";
    }
    return "No error";
}

CauseLabel cause_label_from_string(std::string_view s) {
    if (s == "no_error") return CauseLabel::NoError;
    if (s == "asr_error") return CauseLabel::AsrError;
    if (s == "nlu_error") return CauseLabel::NluError;
    if (s == "lg_error") return CauseLabel::LgError;
    if (s == "unsupported_action") return CauseLabel::UnsupportedAction;
    if (s == "endpoint_error") return CauseLabel::EndpointError;
    if (s == "uninterpretable_input") return CauseLabel::UninterpretableInput;
    throw ValidationError("unknown gold_label \"" + std::string(s) + "\"");
}

std::size_t task_label_index(CauseLabel l) {
    for (std::size_t i = 0; i < kTaskLabels.size(); ++i)
        if (kTaskLabels[i] == l) return i;
    throw ValidationError("label " + std::string(to_string(l)) + " is not a task label");
}

namespace {

bool is_blank(std::string_view s) {
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) return false;
    return true;
}

const json& require_field(const json& j, const char* key, const char* ctx) {
    auto it = j.find(key);
    if (it == j.end())
        throw ParseError(std::string("missing required field \"") + key + "\" in " + ctx);
    return *it;
}

Utterance utterance_from_json(const json& j, const char* which) {
    if (!j.is_object()) throw ParseError(std::string(which) + " must be an object");
    Utterance u;
    u.text = require_field(j, "text", which).get<std::string>();
    u.input_type = input_type_from_string(require_field(j, "input_type", which).get<std::string>());
    u.timestamp_ms = require_field(j, "timestamp_ms", which).get<std::int64_t>();
    u.intent = require_field(j, "intent", which).get<std::string>();
    if (auto it = j.find("asr_confidence"); it != j.end() && !it->is_null())
        u.asr_confidence = it->get<double>();
    if (auto it = j.find("voice_len_s"); it != j.end() && !it->is_null())
        u.voice_len_s = it->get<double>();
    if (auto it = j.find("slots"); it != j.end() && !it->is_null()) {
        if (!it->is_object()) throw ParseError(std::string(which) + ".slots must be an object");
        for (auto& [k, v] : it->items()) u.slots[k] = v.get<std::string>();
    }

    if (is_blank(u.text))
        throw ValidationError(std::string(which) + ".text is empty");
    if (u.intent.empty())
        throw ValidationError(std::string(which) + ".intent is empty");
    if (u.timestamp_ms < 0)
        throw ValidationError(std::string(which) + ".timestamp_ms is negative");
    const bool voice = u.input_type == InputType::Voice;
    if (voice != u.asr_confidence.has_value())
        throw ValidationError(std::string(which) + ".asr_confidence must be present iff input_type is voice");
    if (voice != u.voice_len_s.has_value())
        throw ValidationError(std::string(which) + ".voice_len_s must be present iff input_type is voice");
    if (u.asr_confidence && (*u.asr_confidence < 0.0 || *u.asr_confidence > 1.0))
        throw ValidationError(std::string(which) + ".asr_confidence out of [0,1]");
    if (u.voice_len_s && *u.voice_len_s < 0.0)
        throw ValidationError(std::string(which) + ".voice_len_s is negative");
    return u;
}

json utterance_to_json(const Utterance& u) {
    json j;
    j["text"] = u.text;
    j["input_type"] = std::string(to_string(u.input_type));
    j["timestamp_ms"] = u.timestamp_ms;
    j["intent"] = u.intent;
    j["slots"] = json::object();
    for (const auto& [k, v] : u.slots) j["slots"][k] = v;
    if (u.asr_confidence) j["asr_confidence"] = *u.asr_confidence;
    if (u.voice_len_s) j["voice_len_s"] = *u.voice_len_s;
    return j;
}

} // namespace

ExchangeRecord record_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("record line must be a JSON object");
    ExchangeRecord rec;
    rec.id = require_field(j, "id", "record").get<std::string>();
    if (rec.id.empty()) throw ValidationError("record id is empty");
    rec.u1 = utterance_from_json(require_field(j, "u1", "record"), "u1");
    const json& r = require_field(j, "r", "record");
    if (!r.is_object()) throw ParseError("r must be an object");
    rec.response.text = require_field(r, "text", "r").get<std::string>();
    rec.response.action = require_field(r, "action", "r").get<std::string>();
    rec.u2 = utterance_from_json(require_field(j, "u2", "record"), "u2");
    if (auto it = j.find("gold_label"); it != j.end() && !it->is_null())
        rec.gold_label = cause_label_from_string(it->get<std::string>());

    if (rec.response.text.empty() && rec.response.action.empty())
        throw ValidationError("record " + rec.id + ": response text and action are both empty");
    if (rec.u2.timestamp_ms < rec.u1.timestamp_ms)
        throw ValidationError("record " + rec.id + ": u2.timestamp_ms precedes u1.timestamp_ms");
    return rec;
}

ExchangeRecord parse_record(std::string_view line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
    return record_from_json(j);
}

json record_to_json(const ExchangeRecord& rec) {
    json j;
    j["id"] = rec.id;
    j["u1"] = utterance_to_json(rec.u1);
    j["r"] = {{"text", rec.response.text}, {"action", rec.response.action}};
    j["u2"] = utterance_to_json(rec.u2);
    j["gold_label"] = rec.gold_label ? json(std::string(to_string(*rec.gold_label))) : json(nullptr);
    return j;
}

std::string serialize_record(const ExchangeRecord& rec) {
    return record_to_json(rec).dump();
}

Corpus load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open corpus file " + path.string());
    Corpus corpus;
    std::unordered_map<std::string, std::size_t> line_of_id;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        ExchangeRecord rec;
        try {
            rec = parse_record(line);
        } catch (const Error& e) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
        auto [it, inserted] = line_of_id.emplace(rec.id, line_no);
        if (!inserted)
            throw ValidationError(path.string() + ": duplicate id \"" + rec.id + "\" on lines " +
                                  std::to_string(it->second) + " and " + std::to_string(line_no));
        corpus.records.push_back(std::move(rec));
    }
    corpus.provenance.push_back("loaded " + std::to_string(corpus.records.size()) +
                                " records from " + path.string());
    return corpus;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        for (const ExchangeRecord& rec : corpus.records) out << serialize_record(rec) << '\n';
    }
    std::filesystem::rename(tmp, path);
}

double interval_seconds(const ExchangeRecord& rec) {
    return static_cast<double>(rec.u2.timestamp_ms - rec.u1.timestamp_ms) / 1000.0;
}

Corpus filter_pairs(const Corpus& corpus, const FilterParams& params) {
    Corpus out;
    out.provenance = corpus.provenance;
    std::size_t removed_interval = 0, removed_low = 0, removed_high = 0;
    for (const ExchangeRecord& rec : corpus.records) {
        if (interval_seconds(rec) > params.max_interval_s) {
            ++removed_interval;
            continue;
        }
        const double d = textops::normalized_edit_distance(rec.u1.text, rec.u2.text);
        if (d <= params.min_dist) {
            ++removed_low;
            continue;
        }
        if (d > params.max_dist) {
            ++removed_high;
            continue;
        }
        out.records.push_back(rec);
    }
    std::ostringstream note;
    note << "filter_pairs kept " << out.records.size() << " of " << corpus.records.size()
         << " (removed interval=" << removed_interval << " dist_low=" << removed_low
         << " dist_high=" << removed_high << "; max_interval_s=" << params.max_interval_s
         << " dist range (" << params.min_dist << "," << params.max_dist << "])";
    out.provenance.push_back(note.str());
    return out;
}

Corpus restrict_to_task_labels(const Corpus& corpus) {
    Corpus out;
    out.provenance = corpus.provenance;
    std::size_t dropped_uninterpretable = 0, dropped_unsupported = 0, dropped_endpoint = 0;
    for (const ExchangeRecord& rec : corpus.records) {
        if (!rec.gold_label)
            throw ValidationError("record " + rec.id + " has no gold_label");
        switch (*rec.gold_label) {
        case CauseLabel::UninterpretableInput: ++dropped_uninterpretable; continue;
        case CauseLabel::UnsupportedAction: ++dropped_unsupported; continue;
        case CauseLabel::EndpointError: ++dropped_endpoint; continue;
        default: out.records.push_back(rec);
        }
    }
    std::ostringstream note;
    note << "restrict_to_task_labels kept " << out.records.size() << " of "
         << corpus.records.size() << " (dropped uninterpretable_input=" << dropped_uninterpretable
         << " unsupported_action=" << dropped_unsupported << " endpoint_error=" << dropped_endpoint
         << ")";
    out.provenance.push_back(note.str());
    return out;
}

} // namespace reformcause
