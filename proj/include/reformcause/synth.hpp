#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "reformcause/corpus.hpp"
#include "reformcause/textops.hpp"

namespace reformcause {

/// One templated utterance in the phrase bank.
struct UtteranceTemplate {
    std::string intent;
    std::vector<std::string> tokens;
    std::map<std::string, std::string> slots;  // slot name -> value token
};

struct PhraseBank {
    std::vector<UtteranceTemplate> templates;
    std::vector<std::vector<std::string>> addon_runs;        // generic ADD insertions
    std::vector<std::vector<std::string>> replacement_runs;  // generic PAR replacements
    std::vector<std::vector<std::string>> frustration_runs;  // reject/IDU/abuse phrases
    std::vector<std::vector<std::string>> gratitude_runs;    // praise/thanking phrases
    std::map<std::string, std::vector<std::string>> slot_alternatives;  // value -> alternatives
};

struct AsrConfParams {
    double mean = 0.85;
    double spread = 0.10;
};

/// Per-label generation knobs beyond the published distributions. These
/// control task difficulty and are configurable, not measured values.
struct SignalKnobs {
    double asr_intent_scramble_prob = 0.5;   // AsrError: U1 intent wrongly recognized
    double nlu_intent_error_prob = 0.7;      // NluError: wrong intent (else wrong slots)
    double no_error_slot_change_prob = 0.45; // NoError: U2 re-asks with different slots
    double no_error_chat_prob = 0.15;        // NoError: share of chat-intent records
    double lg_phrase_prob = 0.7;             // LgError: U2 carries a frustration phrase
    double no_error_phrase_prob = 0.1;       // NoError chat: U2 carries a gratitude phrase
};

struct SynthConfig {
    int n = 1000;
    std::uint64_t seed = 42;
    // Keyed by task label index (NoError, AsrError, NluError, LgError).
    std::array<double, 4> label_priors{};
    // Rows per task label; columns ADD, OMIT, PAR, OTHER.
    std::array<std::array<double, 4>, 4> correction_dist{};
    // Rows per task label; columns V2V, T2T, V2T, T2V.
    std::array<std::array<double, 4>, 4> switch_dist{};
    std::array<AsrConfParams, 4> asr_conf_params{};
    SignalKnobs knobs;
    PhraseBank bank;
};

/// Defaults follow the published distributions: label priors are the four
/// task-label rates renormalized, correction rows and switch rows are the
/// measured per-label percentages (renormalized where a row's sum is not
/// exactly 100). ASR confidence parameters are invented, configurable knobs.
SynthConfig default_config();

/// Validates distribution sums and bank coverage; throws ConfigError.
void validate_config(const SynthConfig& config);

/// Deterministic generator. Every record passes the sampling filter
/// (0 < edit distance <= 0.5, interval <= 1800 s), and the word-level
/// correction classifier recovers exactly the correction type sampled
/// for the record.
Corpus generate_corpus(const SynthConfig& config);

/// JSON overrides on top of default_config(); any field may be omitted.
SynthConfig synth_config_from_json(const nlohmann::json& j);
SynthConfig load_synth_config(const std::filesystem::path& path);

} // namespace reformcause
