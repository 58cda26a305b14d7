#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace reformcause {

enum class InputType { Voice, Text };

std::string_view to_string(InputType t);
InputType input_type_from_string(std::string_view s);

/// Annotation taxonomy. The prediction task uses only the first four
/// values; the remaining three are ingested and filtered, never predicted.
enum class CauseLabel {
    NoError,
    AsrError,
    NluError,
    LgError,
    UnsupportedAction,
    EndpointError,
    UninterpretableInput,
};

inline constexpr std::array<CauseLabel, 4> kTaskLabels = {
    CauseLabel::NoError,
    CauseLabel::AsrError,
    CauseLabel::NluError,
    CauseLabel::LgError,
};

bool is_task_label(CauseLabel l);
std::string_view to_string(CauseLabel l);     // snake_case wire form
std::string_view display_name(CauseLabel l);  // "No error", "ASR error", ...
CauseLabel cause_label_from_string(std::string_view s);
/// Index of a task label in kTaskLabels order.
std::size_t task_label_index(CauseLabel l);

struct Utterance {
    std::string text;
    InputType input_type = InputType::Voice;
    std::int64_t timestamp_ms = 0;
    std::optional<double> asr_confidence;  // present iff voice
    std::optional<double> voice_len_s;     // present iff voice
    std::string intent;
    std::map<std::string, std::string> slots;

    bool operator==(const Utterance&) const = default;
};

struct SystemResponse {
    std::string text;
    std::string action;

    bool operator==(const SystemResponse&) const = default;
};

/// One (U1, R, U2) exchange: an utterance, the system response to it, and
/// the user's follow-up.
struct ExchangeRecord {
    std::string id;
    Utterance u1;
    SystemResponse response;
    Utterance u2;
    std::optional<CauseLabel> gold_label;

    bool operator==(const ExchangeRecord&) const = default;
};

struct Corpus {
    std::vector<ExchangeRecord> records;
    std::vector<std::string> provenance;
};

/// Parses and validates one JSONL line. Throws ParseError for malformed or
/// incomplete JSON and ValidationError when a field violates an invariant.
ExchangeRecord parse_record(std::string_view line);

nlohmann::json record_to_json(const ExchangeRecord& rec);
std::string serialize_record(const ExchangeRecord& rec);
ExchangeRecord record_from_json(const nlohmann::json& j);

/// Loads a JSONL corpus; blank lines are skipped. Errors carry the
/// offending line number; duplicate ids report both lines.
Corpus load_corpus(const std::filesystem::path& path);

/// Writes JSONL atomically (temp file + rename).
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

double interval_seconds(const ExchangeRecord& rec);

struct FilterParams {
    double max_interval_s = 1800.0;
    double min_dist = 0.0;  // exclusive
    double max_dist = 0.5;  // inclusive
};

/// Keeps records whose interval is at most max_interval_s and whose
/// normalized character edit distance d satisfies min_dist < d <= max_dist.
Corpus filter_pairs(const Corpus& corpus, const FilterParams& params = {});

/// Drops UninterpretableInput, UnsupportedAction and EndpointError records.
/// Every record must carry a gold label.
Corpus restrict_to_task_labels(const Corpus& corpus);

} // namespace reformcause
