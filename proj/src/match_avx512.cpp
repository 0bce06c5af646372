// Quantized brute-force matcher. The heavy |Q| x |S| cosine pass runs as an
// exact int16 dot-product (AVX-512 VNNI); every winner and near-tie is then
// refined through the canonical double-precision cosine, so the table is
// bitwise identical to the reference backend's.
//
// Soundness of the prefilter: with a = round(2047 * q_hat) and
// b = round(2047 * s_hat), the integer score D = sum(a_k * b_k) satisfies
//   |2047^2 * cos(q, s) - D| <= 0.5*sum|a| + 0.5*sum|b| + 0.25*K  =:  B.
// Hence if D_x - D_y > 2B the true cosines are strictly ordered, and any
// candidate for the exact per-segment argmax lies within 2B of the segment's
// integer maximum. K <= 512 keeps |D| within int32.

#include "nbnn/detail/match_table.hpp"

#if defined(NBNN_HAVE_AVX512_MATCHER)

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <vector>

#include "nbnn/similarity.hpp"

namespace nbnn::detail {

namespace {

constexpr int kRowsPerTile = 4;   // MR
constexpr int kColsPerTile = 32;  // NR, two 16-lane chunks
constexpr std::int32_t kIntMin = std::numeric_limits<std::int32_t>::min();

struct Scratch {
    std::vector<std::int16_t> pool_pairs;  // [kp][j][2] pair-interleaved, j padded
    std::vector<std::int32_t> pool_l1;     // sum |b| per pool descriptor
    std::vector<std::int16_t> query_rows;  // row-major, rows padded to MR
    std::vector<std::int32_t> query_l1;
    std::vector<std::int32_t> scores;      // |Q| x padded(|S|) int32
    std::vector<std::int32_t> col_best;
    std::vector<std::int32_t> col_second;
    std::vector<std::int32_t> col_index;
};

thread_local Scratch tls;

inline std::int16_t quant16(double v) {
    const double x = v * 2047.0;
    return static_cast<std::int16_t>(x >= 0.0 ? x + 0.5 : x - 0.5);
}

// Quantize one descriptor onto the unit sphere; returns the L1 sum.
inline std::int32_t quantize_unit(DescriptorView d, double nrm, std::int16_t* out,
                                  std::size_t k_padded) {
    std::int32_t l1 = 0;
    for (std::size_t k = 0; k < d.size(); ++k) {
        const std::int16_t q = quant16(d[k] / nrm);
        out[k] = q;
        l1 += q < 0 ? -q : q;
    }
    for (std::size_t k = d.size(); k < k_padded; ++k) {
        out[k] = 0;
    }
    return l1;
}

// Exact top-2 (plus argmax index, lowest on ties) over row[begin, end).
struct SegmentTop2 {
    std::int32_t best = kIntMin;
    std::int32_t second = kIntMin;
    std::size_t index = 0;
};

SegmentTop2 scan_segment(const std::int32_t* row, std::size_t begin, std::size_t end) {
    SegmentTop2 r;
    std::size_t j = begin;
    if (end - begin >= 48) {
        __m512i vbest = _mm512_set1_epi32(kIntMin);
        __m512i vsecond = _mm512_set1_epi32(kIntMin);
        __m512i vindex = _mm512_setzero_si512();
        const __m512i iota = _mm512_setr_epi32(0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15);
        for (; j + 16 <= end; j += 16) {
            const __m512i cur = _mm512_loadu_si512(row + j);
            const __mmask16 gt = _mm512_cmpgt_epi32_mask(cur, vbest);
            vsecond = _mm512_max_epi32(vsecond, _mm512_min_epi32(cur, vbest));
            vbest = _mm512_max_epi32(vbest, cur);
            vindex = _mm512_mask_blend_epi32(
                gt, vindex, _mm512_add_epi32(iota, _mm512_set1_epi32(static_cast<int>(j))));
        }
        alignas(64) std::int32_t best16[16];
        alignas(64) std::int32_t second16[16];
        alignas(64) std::int32_t index16[16];
        _mm512_store_si512(best16, vbest);
        _mm512_store_si512(second16, vsecond);
        _mm512_store_si512(index16, vindex);
        // Horizontal merge: lanes track disjoint residues of j, so equal
        // bests resolve to the smallest recorded index.
        int winner = -1;
        for (int lane = 0; lane < 16; ++lane) {
            const std::int32_t b = best16[lane];
            if (winner < 0 || b > r.best || (b == r.best && index16[lane] < index16[winner])) {
                if (winner >= 0) {
                    r.second = std::max(r.second, r.best);
                }
                r.best = b;
                winner = lane;
            } else {
                r.second = std::max(r.second, b);
            }
        }
        r.index = static_cast<std::size_t>(index16[winner]);
        for (int lane = 0; lane < 16; ++lane) {
            r.second = std::max(r.second, second16[lane]);
        }
    }
    for (; j < end; ++j) {
        const std::int32_t v = row[j];
        if (v > r.best) {
            r.second = r.best;
            r.best = v;
            r.index = j;
        } else if (v > r.second) {
            r.second = v;
        }
    }
    return r;
}

}  // namespace

MatchTable build_match_table_avx512(const DescriptorSet& queries, const SupportPool& pool) {
    if (queries.dim() != pool.dim()) {
        throw DimensionMismatch("match table: query dim " + std::to_string(queries.dim()) +
                                " vs pool dim " + std::to_string(pool.dim()));
    }
    const std::size_t nq = queries.size();
    const std::size_t ns = pool.merged_size();
    const std::size_t nc = pool.class_count();
    const std::size_t dim = queries.dim();
    const DescriptorSet& merged = pool.merged();

    const std::size_t k2 = (dim + 1) & ~std::size_t{1};
    const std::size_t kp = k2 / 2;
    const std::size_t ns_pad = (ns + kColsPerTile - 1) & ~std::size_t{kColsPerTile - 1};
    const std::size_t nq_pad = (nq + kRowsPerTile - 1) & ~std::size_t{kRowsPerTile - 1};

    Scratch& s = tls;
    s.pool_pairs.assign(kp * ns_pad * 2, 0);
    s.pool_l1.assign(ns, 0);
    s.query_rows.assign(nq_pad * k2, 0);
    s.query_l1.assign(nq, 0);
    s.scores.resize(nq * ns_pad);
    s.col_best.assign(ns_pad, kIntMin);
    s.col_second.assign(ns_pad, kIntMin);
    s.col_index.assign(ns_pad, 0);

    // Pool side: quantize and lay pairs out as [kp][j][2].
    {
        std::vector<std::int16_t> tmp(k2);
        for (std::size_t j = 0; j < ns; ++j) {
            s.pool_l1[j] = quantize_unit(merged[j], merged.norm(j), tmp.data(), k2);
            for (std::size_t p = 0; p < kp; ++p) {
                s.pool_pairs[(p * ns_pad + j) * 2 + 0] = tmp[2 * p];
                s.pool_pairs[(p * ns_pad + j) * 2 + 1] = tmp[2 * p + 1];
            }
        }
    }
    std::int32_t pool_l1_max = 0;
    for (std::size_t j = 0; j < ns; ++j) {
        pool_l1_max = std::max(pool_l1_max, s.pool_l1[j]);
    }
    std::int32_t query_l1_max = 0;
    for (std::size_t i = 0; i < nq; ++i) {
        s.query_l1[i] =
            quantize_unit(queries[i], queries.norm(i), s.query_rows.data() + i * k2, k2);
        query_l1_max = std::max(query_l1_max, s.query_l1[i]);
    }

    // Integer GEMM with fused column top-2 tracking. Panels of 32 columns
    // stay outermost so the column trackers live in registers.
    for (std::size_t jp = 0; jp < ns_pad; jp += kColsPerTile) {
        __m512i cb0 = _mm512_set1_epi32(kIntMin), cb1 = _mm512_set1_epi32(kIntMin);
        __m512i cs0 = _mm512_set1_epi32(kIntMin), cs1 = _mm512_set1_epi32(kIntMin);
        __m512i ci0 = _mm512_setzero_si512(), ci1 = _mm512_setzero_si512();
        for (std::size_t i0 = 0; i0 < nq_pad; i0 += kRowsPerTile) {
            __m512i acc[kRowsPerTile][2];
            for (int r = 0; r < kRowsPerTile; ++r) {
                acc[r][0] = _mm512_setzero_si512();
                acc[r][1] = _mm512_setzero_si512();
            }
            const std::int16_t* a0 = s.query_rows.data() + (i0 + 0) * k2;
            const std::int16_t* a1 = s.query_rows.data() + (i0 + 1) * k2;
            const std::int16_t* a2 = s.query_rows.data() + (i0 + 2) * k2;
            const std::int16_t* a3 = s.query_rows.data() + (i0 + 3) * k2;
            const std::int16_t* bp = s.pool_pairs.data() + jp * 2;
            for (std::size_t p = 0; p < kp; ++p) {
                const __m512i b0 = _mm512_loadu_si512(bp);
                const __m512i b1 = _mm512_loadu_si512(bp + 32);
                bp += ns_pad * 2;
                std::int32_t w;
                std::memcpy(&w, a0 + 2 * p, 4);
                __m512i a = _mm512_set1_epi32(w);
                acc[0][0] = _mm512_dpwssd_epi32(acc[0][0], a, b0);
                acc[0][1] = _mm512_dpwssd_epi32(acc[0][1], a, b1);
                std::memcpy(&w, a1 + 2 * p, 4);
                a = _mm512_set1_epi32(w);
                acc[1][0] = _mm512_dpwssd_epi32(acc[1][0], a, b0);
                acc[1][1] = _mm512_dpwssd_epi32(acc[1][1], a, b1);
                std::memcpy(&w, a2 + 2 * p, 4);
                a = _mm512_set1_epi32(w);
                acc[2][0] = _mm512_dpwssd_epi32(acc[2][0], a, b0);
                acc[2][1] = _mm512_dpwssd_epi32(acc[2][1], a, b1);
                std::memcpy(&w, a3 + 2 * p, 4);
                a = _mm512_set1_epi32(w);
                acc[3][0] = _mm512_dpwssd_epi32(acc[3][0], a, b0);
                acc[3][1] = _mm512_dpwssd_epi32(acc[3][1], a, b1);
            }
            const std::size_t real_rows = std::min<std::size_t>(kRowsPerTile, nq - std::min(nq, i0));
            for (std::size_t r = 0; r < kRowsPerTile; ++r) {
                const std::size_t i = i0 + r;
                if (r < real_rows) {
                    _mm512_storeu_si512(s.scores.data() + i * ns_pad + jp, acc[r][0]);
                    _mm512_storeu_si512(s.scores.data() + i * ns_pad + jp + 16, acc[r][1]);
                    const __m512i vi = _mm512_set1_epi32(static_cast<int>(i));
                    __mmask16 gt = _mm512_cmpgt_epi32_mask(acc[r][0], cb0);
                    cs0 = _mm512_max_epi32(cs0, _mm512_min_epi32(acc[r][0], cb0));
                    cb0 = _mm512_max_epi32(cb0, acc[r][0]);
                    ci0 = _mm512_mask_blend_epi32(gt, ci0, vi);
                    gt = _mm512_cmpgt_epi32_mask(acc[r][1], cb1);
                    cs1 = _mm512_max_epi32(cs1, _mm512_min_epi32(acc[r][1], cb1));
                    cb1 = _mm512_max_epi32(cb1, acc[r][1]);
                    ci1 = _mm512_mask_blend_epi32(gt, ci1, vi);
                }
            }
        }
        _mm512_storeu_si512(s.col_best.data() + jp, cb0);
        _mm512_storeu_si512(s.col_best.data() + jp + 16, cb1);
        _mm512_storeu_si512(s.col_second.data() + jp, cs0);
        _mm512_storeu_si512(s.col_second.data() + jp + 16, cs1);
        _mm512_storeu_si512(s.col_index.data() + jp, ci0);
        _mm512_storeu_si512(s.col_index.data() + jp + 16, ci1);
    }

    MatchTable t;
    t.query_count = nq;
    t.class_count = nc;
    t.per_class.resize(nq * nc);
    t.row_nn.resize(nq);
    t.row_nn_sim.resize(nq);
    t.col_nn.resize(ns);

    const double half_k = 0.25 * static_cast<double>(k2) * 2.0;

    // Rows: exact per-class winner via top-2 gap test, double refinement of
    // near ties straight from the stored integer scores.
    for (std::size_t i = 0; i < nq; ++i) {
        const std::int32_t* row = s.scores.data() + i * ns_pad;
        const auto margin = static_cast<std::int32_t>(
            std::ceil(static_cast<double>(s.query_l1[i]) + pool_l1_max + half_k)) + 1;
        DescriptorView q = queries[i];
        const double qn = queries.norm(i);
        for (std::size_t c = 0; c < nc; ++c) {
            const auto& range = pool.class_indices(c);
            const SegmentTop2 top = scan_segment(row, range.begin, range.end);
            MatchTable::ClassBest out;
            if (top.second == kIntMin ||
                static_cast<std::int64_t>(top.best) - top.second > margin) {
                out.pool_index = top.index;
                out.sim = cosine_with_norms(q, merged[top.index], qn, merged.norm(top.index));
            } else {
                const std::int32_t cut = top.best - margin;
                out.sim = -std::numeric_limits<double>::infinity();
                out.pool_index = 0;
                for (std::size_t j = range.begin; j < range.end; ++j) {
                    if (row[j] >= cut) {
                        const double sim = cosine_with_norms(q, merged[j], qn, merged.norm(j));
                        if (sim > out.sim) {
                            out.sim = sim;
                            out.pool_index = j;
                        }
                    }
                }
            }
            t.per_class[i * nc + c] = out;
        }
        std::size_t best_idx = 0;
        double best_sim = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < nc; ++c) {
            const auto& slot = t.per_class[i * nc + c];
            if (slot.sim > best_sim || (slot.sim == best_sim && slot.pool_index < best_idx)) {
                best_sim = slot.sim;
                best_idx = slot.pool_index;
            }
        }
        t.row_nn[i] = best_idx;
        t.row_nn_sim[i] = best_sim;
    }

    // Columns: the tracked argmax is exact unless a competitor sits within
    // the margin, in which case the column is rescanned and refined.
    for (std::size_t j = 0; j < ns; ++j) {
        const auto margin = static_cast<std::int32_t>(
            std::ceil(static_cast<double>(s.pool_l1[j]) + query_l1_max + half_k)) + 1;
        if (s.col_second[j] == kIntMin ||
            static_cast<std::int64_t>(s.col_best[j]) - s.col_second[j] > margin) {
            t.col_nn[j] = static_cast<std::size_t>(s.col_index[j]);
            continue;
        }
        const std::int32_t cut = s.col_best[j] - margin;
        DescriptorView sd = merged[j];
        const double sn = merged.norm(j);
        double best_sim = -std::numeric_limits<double>::infinity();
        std::size_t best_i = 0;
        for (std::size_t i = 0; i < nq; ++i) {
            if (s.scores[i * ns_pad + j] >= cut) {
                const double sim = cosine_with_norms(queries[i], sd, queries.norm(i), sn);
                if (sim > best_sim) {
                    best_sim = sim;
                    best_i = i;
                }
            }
        }
        t.col_nn[j] = best_i;
    }
    return t;
}

}  // namespace nbnn::detail

#endif  // NBNN_HAVE_AVX512_MATCHER
