// Internal kernel function table shared by the dispatch layer and backends.
#pragma once

#include <cstddef>
#include <cstdint>

namespace ratedist::kernels::detail {

struct KernelTable {
    double (*sum)(const double*, std::size_t);
    double (*dot)(const double*, const double*, std::size_t);
    double (*wsum_min)(const double*, const double*, std::size_t, double);
    double (*wsum_log_ratio)(const double*, const double*, std::size_t, double);
    double (*wsum_log)(const double*, const double*, std::size_t, double);
    double (*sum_sq_lincomb)(const double*, const double*, std::size_t, double, double);
    void (*clip_upper)(const double*, std::size_t, double, double*);
    void (*gaussian_pairs)(std::uint64_t, std::uint64_t, std::size_t, double*, double*);
};

extern const KernelTable scalar_table;
extern const KernelTable avx2_table;  // defined only when the AVX2 TU is built

}  // namespace ratedist::kernels::detail
