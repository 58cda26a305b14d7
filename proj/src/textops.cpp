#include "reformcause/textops.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <unordered_set>

namespace reformcause::textops {

std::string_view to_string(CorrectionType t) {
    switch (t) {
    case CorrectionType::Add: return "ADD";
    case CorrectionType::Omit: return "OMIT";
    case CorrectionType::Par: return "PAR";
    case CorrectionType::Other: return "OTHER";
    }
    return "OTHER";
}

std::string_view to_string(RegionKind k) {
    switch (k) {
    case RegionKind::Match: return "match";
    case RegionKind::Insert: return "insert";
    case RegionKind::Delete: return "delete";
    case RegionKind::Replace: return "replace";
    }
    return "match";
}

std::vector<std::uint32_t> decode_utf8(std::string_view s) {
    std::vector<std::uint32_t> out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        unsigned char b = static_cast<unsigned char>(s[i]);
        std::uint32_t cp = b;
        std::size_t extra = 0;
        if (b < 0x80) {
            extra = 0;
        } else if ((b & 0xE0) == 0xC0) {
            cp = b & 0x1F;
            extra = 1;
        } else if ((b & 0xF0) == 0xE0) {
            cp = b & 0x0F;
            extra = 2;
        } else if ((b & 0xF8) == 0xF0) {
            cp = b & 0x07;
            extra = 3;
        } else {
            // stray continuation byte; treat as one unit
            out.push_back(b);
            ++i;
            continue;
        }
        if (extra > 0 && i + extra >= s.size()) { // truncated sequence
            out.push_back(b);
            ++i;
            continue;
        }
        bool ok = true;
        std::uint32_t acc = cp;
        for (std::size_t k = 1; k <= extra; ++k) {
            unsigned char c = static_cast<unsigned char>(s[i + k]);
            if ((c & 0xC0) != 0x80) {
                ok = false;
                break;
            }
            acc = (acc << 6) | (c & 0x3F);
        }
        if (!ok) {
            out.push_back(b);
            ++i;
            continue;
        }
        out.push_back(acc);
        i += extra + 1;
    }
    return out;
}

bool is_ignorable_space(std::uint32_t cp) {
    switch (cp) {
    case ' ':
    case '\t':
    case '\n':
    case '\r':
    case '\f':
    case '\v':
    case 0x00A0:
    case 0x3000:
        return true;
    default:
        return false;
    }
}

std::size_t char_length(std::string_view s) {
    std::size_t n = 0;
    for (std::uint32_t cp : decode_utf8(s)) {
        if (!is_ignorable_space(cp)) ++n;
    }
    return n;
}

TokenSequence tokenize(std::string_view text) {
    TokenSequence seq;
    std::string cur;
    auto flush = [&]() {
        if (cur.empty()) return;
        std::size_t b = 0, e = cur.size();
        while (b < e && std::ispunct(static_cast<unsigned char>(cur[b]))) ++b;
        while (e > b && std::ispunct(static_cast<unsigned char>(cur[e - 1]))) --e;
        if (e > b) seq.tokens.push_back(cur.substr(b, e - b));
        cur.clear();
    };
    for (char ch : text) {
        unsigned char u = static_cast<unsigned char>(ch);
        if (u < 0x80 && std::isspace(u)) {
            flush();
        } else {
            cur.push_back(u < 0x80 ? static_cast<char>(std::tolower(u)) : ch);
        }
    }
    flush();
    return seq;
}

namespace {

std::vector<std::uint32_t> strip_spaces(std::string_view s) {
    std::vector<std::uint32_t> out;
    for (std::uint32_t cp : decode_utf8(s)) {
        if (!is_ignorable_space(cp)) out.push_back(cp);
    }
    return out;
}

} // namespace

double normalized_edit_distance(std::string_view a, std::string_view b) {
    std::vector<std::uint32_t> x = strip_spaces(a);
    std::vector<std::uint32_t> y = strip_spaces(b);
    if (x.empty() && y.empty()) return 0.0;
    const std::size_t n = x.size(), m = y.size();
    std::vector<std::size_t> prev(m + 1), cur(m + 1);
    for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
    for (std::size_t i = 1; i <= n; ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= m; ++j) {
            std::size_t sub = prev[j - 1] + (x[i - 1] == y[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return static_cast<double>(prev[m]) / static_cast<double>(std::max(n, m));
}

EditScript word_diff(const TokenSequence& u1, const TokenSequence& u2) {
    const auto& a = u1.tokens;
    const auto& b = u2.tokens;
    const std::size_t n = a.size(), m = b.size();

    // lcs[i][j] = LCS length of a[i..], b[j..]
    std::vector<std::vector<std::size_t>> lcs(n + 1, std::vector<std::size_t>(m + 1, 0));
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t j = m; j-- > 0;) {
            if (a[i] == b[j])
                lcs[i][j] = lcs[i + 1][j + 1] + 1;
            else
                lcs[i][j] = std::max(lcs[i + 1][j], lcs[i][j + 1]);
        }
    }

    // Walk forward collecting matched pairs; among optimal alignments pick
    // the match with the smallest u1 index, then the smallest u2 index.
    std::vector<std::pair<std::size_t, std::size_t>> matches;
    std::size_t i = 0, j = 0;
    while (lcs[i][j] > 0) {
        const std::size_t r = lcs[i][j];
        bool found = false;
        for (std::size_t i2 = i; i2 < n && !found; ++i2) {
            if (lcs[i2][j] < r) break; // skipped an irreplaceable row
            for (std::size_t j2 = j; j2 < m; ++j2) {
                if (lcs[i2][j2] < r) break;
                if (a[i2] == b[j2] && lcs[i2 + 1][j2 + 1] == r - 1) {
                    matches.emplace_back(i2, j2);
                    i = i2 + 1;
                    j = j2 + 1;
                    found = true;
                    break;
                }
            }
        }
        if (!found) break; // unreachable for a correct table
    }

    EditScript script;
    auto emit_gap = [&](std::size_t a0, std::size_t a1, std::size_t b0, std::size_t b1) {
        if (a0 == a1 && b0 == b1) return;
        RegionKind kind = a0 == a1 ? RegionKind::Insert
                        : b0 == b1 ? RegionKind::Delete
                                   : RegionKind::Replace;
        script.regions.push_back({kind, a0, a1, b0, b1});
    };

    std::size_t pa = 0, pb = 0;
    std::size_t k = 0;
    while (k < matches.size()) {
        auto [mi, mj] = matches[k];
        emit_gap(pa, mi, pb, mj);
        // collapse a run of consecutive matches into one region
        std::size_t run = 1;
        while (k + run < matches.size() && matches[k + run].first == mi + run &&
               matches[k + run].second == mj + run)
            ++run;
        script.regions.push_back({RegionKind::Match, mi, mi + run, mj, mj + run});
        pa = mi + run;
        pb = mj + run;
        k += run;
    }
    emit_gap(pa, n, pb, m);
    return script;
}

CorrectionType classify_correction(const EditScript& script) {
    bool any_match = false;
    std::size_t inserts = 0, deletes = 0, replaces = 0;
    for (const Region& r : script.regions) {
        switch (r.kind) {
        case RegionKind::Match: any_match = true; break;
        case RegionKind::Insert: ++inserts; break;
        case RegionKind::Delete: ++deletes; break;
        case RegionKind::Replace: ++replaces; break;
        }
    }
    if (!any_match) return CorrectionType::Other; // covers empty and disjoint scripts
    const std::size_t edits = inserts + deletes + replaces;
    if (edits == 0) return CorrectionType::Other; // identical sequences
    if (inserts == edits) return CorrectionType::Add;
    if (deletes == edits) return CorrectionType::Omit;
    if (replaces == 1 && edits == 1) return CorrectionType::Par;
    return CorrectionType::Other;
}

int common_word_count(const TokenSequence& u1, const TokenSequence& u2) {
    std::unordered_set<std::string_view> a(u1.tokens.begin(), u1.tokens.end());
    std::unordered_set<std::string_view> seen;
    int n = 0;
    for (const std::string& t : u2.tokens) {
        if (a.count(t) && seen.insert(t).second) ++n;
    }
    return n;
}

} // namespace reformcause::textops
