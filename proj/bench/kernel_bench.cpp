// Serial vs OpenMP kernel timings on a desk-scale training batch.
//
//   kernel_bench [--batch B] [--reps R]

#include "jssr/kernels.hpp"
#include "jssr/rng.hpp"
#include "jssr/signal_model.hpp"

#include "CLI11.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <vector>

using namespace jssr;
namespace k = jssr::kernels;

namespace {

double median_ms(int reps, const std::function<void()>& f) {
    f();
    std::vector<double> t;
    for (int r = 0; r < reps; ++r) {
        const auto start = std::chrono::steady_clock::now();
        f();
        t.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count());
    }
    std::nth_element(t.begin(), t.begin() + reps / 2, t.end());
    return t[static_cast<std::size_t>(reps / 2)];
}

void row(const char* name, int reps, const std::function<void()>& serial, const std::function<void()>& parallel) {
    const double s = median_ms(reps, serial);
    const double p = median_ms(reps, parallel);
    std::printf("%-22s %10.3f %10.3f %8.2fx\n", name, s, p, s / p);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"kernel benchmark"};
    Index B = 128;
    int reps = 20;
    Index N = 100, L = 14, M = 4;
    app.add_option("--batch", B, "samples per batch");
    app.add_option("--reps", reps, "timed repetitions")->check(CLI::PositiveNumber);
    app.add_option("--N", N);
    app.add_option("--L", L);
    app.add_option("--M", M);
    CLI11_PARSE(app, argc, argv);

    Rng rng(1);
    const ComplexMatrix A = sample_channels(L, N, rng);
    const ComplexMatrix X = sample_channels(N, B * M, rng);
    const ComplexMatrix Z = sample_noise(L, B * M, 0.1, rng);
    const ComplexMatrix Y = k::serial::encode(A, X, Z);
    const Eigen::MatrixXd F = k::serial::covariance_features(Y, M);
    const Eigen::MatrixXd R = k::serial::raw_features(Y, M);

    std::printf("N=%ld L=%ld M=%ld B=%ld threads=%d (median ms)\n", static_cast<long>(N), static_cast<long>(L),
                static_cast<long>(M), static_cast<long>(B), omp_get_max_threads());
    std::printf("%-22s %10s %10s %9s\n", "kernel", "serial", "parallel", "speedup");
    row("encode", reps, [&] { k::serial::encode(A, X, Z); }, [&] { k::parallel::encode(A, X, Z); });
    row("covariance_features", reps, [&] { k::serial::covariance_features(Y, M); },
        [&] { k::parallel::covariance_features(Y, M); });
    row("covariance_backward", reps, [&] { k::serial::covariance_backward(Y, F, M); },
        [&] { k::parallel::covariance_backward(Y, F, M); });
    row("raw_features", reps, [&] { k::serial::raw_features(Y, M); }, [&] { k::parallel::raw_features(Y, M); });
    row("raw_backward", reps, [&] { k::serial::raw_backward(R, L, M); }, [&] { k::parallel::raw_backward(R, L, M); });
    row("sensing_gradient", reps, [&] { k::serial::sensing_gradient(Y, X); },
        [&] { k::parallel::sensing_gradient(Y, X); });
    return 0;
}
