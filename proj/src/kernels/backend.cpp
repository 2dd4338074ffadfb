#include "ratedist/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "table.hpp"

namespace ratedist::kernels {
namespace {

using detail::KernelTable;

bool avx2_usable() {
#if RATEDIST_HAVE_AVX2_TU
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

const KernelTable* table_for(Backend b) {
#if RATEDIST_HAVE_AVX2_TU
    if (b == Backend::avx2) return &detail::avx2_table;
#endif
    (void)b;
    return &detail::scalar_table;
}

Backend pick_default() {
    if (const char* env = std::getenv("RATEDIST_KERNELS")) {
        const std::string name(env);
        if (name == "scalar") return Backend::scalar;
        if (name == "avx2" && avx2_usable()) return Backend::avx2;
        // Unknown or unavailable values fall through to autodetection.
    }
    return avx2_usable() ? Backend::avx2 : Backend::scalar;
}

// Selected once; force_backend() swaps the table atomically so tests can
// flip backends without re-running process startup.
std::atomic<const KernelTable*> active_table{nullptr};
std::atomic<Backend> active_kind{Backend::scalar};

const KernelTable& table() {
    const KernelTable* t = active_table.load(std::memory_order_acquire);
    if (t == nullptr) {
        const Backend b = pick_default();
        active_kind.store(b, std::memory_order_relaxed);
        t = table_for(b);
        active_table.store(t, std::memory_order_release);
    }
    return *t;
}

void require_same_size(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw std::invalid_argument("kernels: span sizes must match");
}

}  // namespace

Backend active_backend() {
    table();  // ensure selection happened
    return active_kind.load(std::memory_order_relaxed);
}

const char* backend_name() {
    return active_backend() == Backend::avx2 ? "avx2" : "scalar";
}

bool backend_available(Backend b) {
    return b == Backend::scalar || (b == Backend::avx2 && avx2_usable());
}

void force_backend(Backend b) {
    if (!backend_available(b))
        throw std::invalid_argument("kernels: requested backend is not available");
    active_kind.store(b, std::memory_order_relaxed);
    active_table.store(table_for(b), std::memory_order_release);
}

double sum(std::span<const double> x) {
    return table().sum(x.data(), x.size());
}

double dot(std::span<const double> w, std::span<const double> x) {
    require_same_size(w, x);
    return table().dot(w.data(), x.data(), x.size());
}

double wsum_min(std::span<const double> w, std::span<const double> x, double level) {
    require_same_size(w, x);
    return table().wsum_min(w.data(), x.data(), x.size(), level);
}

double wsum_log_ratio(std::span<const double> w, std::span<const double> x, double level) {
    require_same_size(w, x);
    return table().wsum_log_ratio(w.data(), x.data(), x.size(), level);
}

double wsum_log(std::span<const double> w, std::span<const double> x, double floor) {
    require_same_size(w, x);
    return table().wsum_log(w.data(), x.data(), x.size(), floor);
}

double sum_sq_lincomb(std::span<const double> z0, std::span<const double> z1,
                      double c0, double c1) {
    require_same_size(z0, z1);
    return table().sum_sq_lincomb(z0.data(), z1.data(), z0.size(), c0, c1);
}

void clip_upper(std::span<const double> x, double level, std::span<double> out) {
    if (x.size() != out.size())
        throw std::invalid_argument("kernels: span sizes must match");
    table().clip_upper(x.data(), x.size(), level, out.data());
}

void gaussian_pairs(std::uint64_t key, std::uint64_t ctr, std::size_t n,
                    double* z0, double* z1) {
    table().gaussian_pairs(key, ctr, n, z0, z1);
}

}  // namespace ratedist::kernels
