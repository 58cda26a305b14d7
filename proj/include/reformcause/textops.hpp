#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace reformcause::textops {

/// Lowercased word tokens; no token is empty or contains whitespace.
struct TokenSequence {
    std::vector<std::string> tokens;

    bool operator==(const TokenSequence&) const = default;
};

enum class RegionKind { Match, Insert, Delete, Replace };

/// One aligned region of a word-level diff. Spans are half-open token
/// index ranges; Insert regions have an empty u1 span, Delete regions an
/// empty u2 span.
struct Region {
    RegionKind kind;
    std::size_t u1_begin = 0, u1_end = 0;
    std::size_t u2_begin = 0, u2_end = 0;

    bool operator==(const Region&) const = default;
};

/// Word-level alignment of two token sequences. Regions tile both
/// sequences exactly and adjacent regions never share a kind.
struct EditScript {
    std::vector<Region> regions;
};

enum class CorrectionType { Add, Omit, Par, Other };

std::string_view to_string(CorrectionType t);
std::string_view to_string(RegionKind k);

/// Lowercases, splits on whitespace, strips leading/trailing punctuation
/// per token and drops tokens that become empty.
TokenSequence tokenize(std::string_view text);

/// Character-level Levenshtein distance with all whitespace removed first,
/// divided by the longer stripped length. 0 when both strip to empty.
double normalized_edit_distance(std::string_view a, std::string_view b);

/// LCS-based word alignment. Ties in the LCS are broken by preferring the
/// match that ends earliest in u1, then earliest in u2.
EditScript word_diff(const TokenSequence& u1, const TokenSequence& u2);

/// ADD if only insertions, OMIT if only deletions, PAR if exactly one
/// replaced region and nothing else, OTHER otherwise. Scripts without any
/// matched region are always OTHER (no word in common).
CorrectionType classify_correction(const EditScript& script);

/// Number of distinct token types appearing in both sequences.
int common_word_count(const TokenSequence& u1, const TokenSequence& u2);

/// Decodes UTF-8 into code points; invalid bytes decode as single units.
std::vector<std::uint32_t> decode_utf8(std::string_view s);

/// True for the whitespace code points ignored by the edit distance
/// (ASCII whitespace, NBSP, ideographic space).
bool is_ignorable_space(std::uint32_t cp);

/// Number of non-whitespace code points in a string.
std::size_t char_length(std::string_view s);

} // namespace reformcause::textops
