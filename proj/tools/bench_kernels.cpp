// Throughput comparison of the two cascade realizations and of the
// analysis-grid evaluation with and without OpenMP threads.
//
//   * MultistageFilter: the per-stage polyphase kernel the controller runs
//     (O(sum of stage orders) per step, unit-stride dots).
//   * CascadeReference: the collapsed composite-kernel realization kept as
//     a correctness oracle (O(full kernel length) per step).
//
// Both must produce the same samples; the benchmark checks that while it
// times them.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qdob/freq_analysis.hpp"
#include "qdob/multistage.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Deterministic noise-ish drive signal; cheap enough to not disturb timing.
double drive(long k) {
    return std::sin(0.37 * static_cast<double>(k)) +
           0.25 * std::sin(2.11 * static_cast<double>(k) + 0.5);
}

struct FilterTiming {
    double steps_per_sec;
    double checksum;
};

template <typename Filter>
FilterTiming time_filter(Filter& filter, long steps) {
    double checksum = 0.0;
    const auto t0 = Clock::now();
    for (long k = 0; k < steps; ++k) {
        checksum += filter.step_cascade();
        filter.push(drive(k));
    }
    const double dt = seconds_since(t0);
    return {static_cast<double>(steps) / dt, checksum};
}

void bench_cascade(const char* name, const qdob::QdobConfig& cfg, long steps) {
    const qdob::MultistagePlan plan =
        qdob::plan_multistage(cfg.sample_time, cfg.period, cfg.omega_a,
                              cfg.stage_count, cfg.max_order);

    qdob::MultistageFilter fast(plan);
    qdob::CascadeReference slow(plan);

    // Correctness first: identical outputs over a shorter run.
    double worst = 0.0;
    for (long k = 0; k < 20000; ++k) {
        const double a = fast.step_cascade();
        const double b = slow.step_cascade();
        worst = std::max(worst, std::abs(a - b));
        const double x = drive(k);
        fast.push(x);
        slow.push(x);
    }
    fast.reset();
    slow.reset();

    const FilterTiming ft = time_filter(fast, steps);
    const FilterTiming st = time_filter(slow, steps / 8 + 1);

    volatile double sink = ft.checksum + st.checksum;  // keep the work observable
    (void)sink;
    std::printf("%-10s kernel %12ld taps  polyphase %10.3f Msteps/s  "
                "reference %8.4f Msteps/s  speedup %6.1fx  agree %.2e\n",
                name, static_cast<long>(slow.kernel_length()),
                ft.steps_per_sec / 1e6, st.steps_per_sec / 1e6,
                ft.steps_per_sec / st.steps_per_sec, worst);
}

void bench_grid(const char* name, const qdob::QdobConfig& cfg) {
    const qdob::QdobAnalysis analysis(cfg);
    const std::vector<double> grid = qdob::default_analysis_grid(cfg, 2000);

#ifdef _OPENMP
    const int max_threads = omp_get_max_threads();
    omp_set_num_threads(1);
    const auto t1 = Clock::now();
    auto serial = analysis.sensitivity(grid);
    const double dt1 = seconds_since(t1);

    omp_set_num_threads(max_threads);
    const auto tn = Clock::now();
    auto parallel = analysis.sensitivity(grid);
    const double dtn = seconds_since(tn);

    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        worst = std::max(worst, std::abs(serial.response[i] - parallel.response[i]));

    std::printf("%-10s grid %8zu points  1 thread %8.3f Mpts/s  %2d threads "
                "%8.3f Mpts/s  speedup %5.2fx  agree %.2e\n",
                name, grid.size(), grid.size() / dt1 / 1e6, max_threads,
                grid.size() / dtn / 1e6, dt1 / dtn, worst);
#else
    const auto t1 = Clock::now();
    auto serial = analysis.sensitivity(grid);
    const double dt1 = seconds_since(t1);
    std::printf("%-10s grid %8zu points  %8.3f Mpts/s  (built without OpenMP)\n",
                name, grid.size(), grid.size() / dt1 / 1e6);
    (void)serial;
#endif
}

}  // namespace

int main() {
    qdob::QdobConfig desk;
    desk.omega_a = 50.0;
    desk.omega_b = 100.0;
    desk.rho = 2.0;
    desk.period = 2.0 * std::numbers::pi / 5.0;
    desk.inertia = 56.13e-4;
    desk.sample_time = 1e-3;

    qdob::QdobConfig dense;
    dense.omega_a = 10.0;
    dense.omega_b = 100.0;
    dense.rho = 0.25;
    dense.period = 2.0 * std::numbers::pi;
    dense.sample_time = 1e-4;
    dense.inertia = 1.0;

    std::printf("cascade step throughput (higher is better)\n");
    bench_cascade("desk", desk, 2'000'000);
    bench_cascade("dense", dense, 2'000'000);

    std::printf("\nanalysis grid throughput\n");
    bench_grid("desk", desk);
    bench_grid("dense", dense);
    return 0;
}
