#include "dofalign/channel.hpp"

#include "dofalign/errors.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dofalign {

namespace {

std::uint64_t splitmix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kChannelStream = 0;
constexpr std::uint64_t kBaseVectorStream = 1;

} // namespace

double CounterRng::uniform(std::uint64_t stream, std::uint64_t counter) const {
    std::uint64_t h = splitmix(splitmix(splitmix(seed_) ^ stream) ^ counter);
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

std::complex<double> CounterRng::bounded_complex(std::uint64_t stream, std::uint64_t counter,
                                                 const ChannelBounds& bounds) const {
    double mag = bounds.lo + (bounds.hi - bounds.lo) * uniform(stream, 2 * counter);
    double phase = 2.0 * std::numbers::pi * uniform(stream, 2 * counter + 1);
    return std::polar(mag, phase);
}

Eigen::MatrixXcd ChannelRealization::matrix(int j, int k, long long t) const {
    Eigen::MatrixXcd h(M, M);
    for (int r = 0; r < M; ++r)
        for (int c = 0; c < M; ++c) h(r, c) = entries[index(j, k, t, r, c)];
    return h;
}

ChannelRealization generate_channels(const DemandSpec& spec, long long tau, std::uint64_t seed,
                                     const ChannelBounds& bounds) {
    if (tau < 1) throw std::invalid_argument("tau must be >= 1");
    if (!(bounds.lo > 0.0) || !(bounds.lo <= bounds.hi) || !std::isfinite(bounds.hi))
        throw std::invalid_argument("channel bounds must satisfy 0 < lo <= hi < inf");
    ChannelRealization chan;
    chan.K = spec.K;
    chan.J = spec.J;
    chan.M = spec.M;
    chan.tau = tau;
    chan.seed = seed;
    chan.bounds = bounds;
    chan.entries.resize(static_cast<std::size_t>(spec.J) * static_cast<std::size_t>(spec.K) *
                        static_cast<std::size_t>(tau) * static_cast<std::size_t>(spec.M) *
                        static_cast<std::size_t>(spec.M));
    CounterRng rng(seed);
    for (int j = 1; j <= spec.J; ++j)
        for (int k = 1; k <= spec.K; ++k)
            for (long long t = 1; t <= tau; ++t)
                for (int r = 0; r < spec.M; ++r)
                    for (int c = 0; c < spec.M; ++c) {
                        std::size_t idx = chan.index(j, k, t, r, c);
                        chan.entries[idx] = rng.bounded_complex(kChannelStream, idx, bounds);
                    }
    const double slack = 1.0 + 1e-12;
    for (const auto& z : chan.entries) {
        double a = std::abs(z);
        if (a < bounds.lo / slack || a > bounds.hi * slack)
            throw std::logic_error("channel entry escaped the magnitude bounds");
    }
    return chan;
}

BaseVectors generate_base_vectors(long long tau, int count, std::uint64_t seed,
                                  const ChannelBounds& bounds) {
    if (tau < 1) throw std::invalid_argument("tau must be >= 1");
    if (count < 0) throw std::invalid_argument("base vector count must be >= 0");
    BaseVectors bv;
    bv.tau = tau;
    bv.seed = seed;
    CounterRng rng(seed);
    for (int i = 0; i < count; ++i) {
        Eigen::VectorXcd w(tau);
        for (long long t = 0; t < tau; ++t)
            w(t) = rng.bounded_complex(kBaseVectorStream,
                                       static_cast<std::uint64_t>(i) *
                                               static_cast<std::uint64_t>(tau) +
                                           static_cast<std::uint64_t>(t),
                                       bounds);
        bv.w.push_back(std::move(w));
    }
    return bv;
}

AlignmentOperator assemble_T(const ChannelRealization& chan, int m, int n, int j) {
    if (chan.M != 1)
        throw std::invalid_argument("assemble_T is the single-antenna path; use TMultiAssembler");
    AlignmentOperator op;
    op.m = m;
    op.n = n;
    op.j = j;
    op.diag.resize(chan.tau);
    for (long long t = 1; t <= chan.tau; ++t)
        op.diag(t - 1) = chan.scalar(j, n, t) / chan.scalar(j, m, t);
    return op;
}

TMultiAssembler::TMultiAssembler(const ChannelRealization& chan, int j, int m)
    : chan_(chan), j_(j), m_(m) {
    if (chan.M < 2) throw std::invalid_argument("TMultiAssembler requires M >= 2");
    per_instant_.reserve(static_cast<std::size_t>(chan.tau));
    for (long long t = 1; t <= chan.tau; ++t) {
        per_instant_.emplace_back(chan.matrix(j, m, t));
        if (!per_instant_.back().isInvertible())
            throw SingularChannelError("channel matrix H(" + std::to_string(j) + "," +
                                       std::to_string(m) + ") at t=" + std::to_string(t) +
                                       " is singular");
    }
}

std::vector<Eigen::VectorXcd> TMultiAssembler::diagonals(int n, int p) const {
    const int M = chan_.M;
    std::vector<Eigen::VectorXcd> diag(static_cast<std::size_t>(M));
    for (auto& d : diag) d.resize(chan_.tau);
    for (long long t = 1; t <= chan_.tau; ++t) {
        Eigen::VectorXcd rhs(M);
        for (int r = 0; r < M; ++r) rhs(r) = chan_.entry(j_, n, t, r, p - 1);
        Eigen::VectorXcd x = per_instant_[static_cast<std::size_t>(t - 1)].solve(rhs);
        for (int q = 0; q < M; ++q) diag[static_cast<std::size_t>(q)](t - 1) = x(q);
    }
    return diag;
}

Eigen::MatrixXcd TMultiAssembler::expanded_column_channel(int n, int p) const {
    const int M = chan_.M;
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(M * chan_.tau, chan_.tau);
    for (long long t = 1; t <= chan_.tau; ++t)
        for (int r = 0; r < M; ++r) h((t - 1) * M + r, t - 1) = chan_.entry(j_, n, t, r, p - 1);
    return h;
}

void TMultiAssembler::ensure_stacked() const {
    if (stacked_ready_) return;
    const int M = chan_.M;
    // Columns ordered antenna-major: all tau columns of antenna 1, then 2, ...
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(M * chan_.tau, M * chan_.tau);
    for (int p = 1; p <= M; ++p)
        for (long long t = 1; t <= chan_.tau; ++t)
            for (int r = 0; r < M; ++r)
                a((t - 1) * M + r, (p - 1) * chan_.tau + (t - 1)) =
                    chan_.entry(j_, m_, t, r, p - 1);
    stacked_.compute(a);
    stacked_ready_ = true;
}

std::vector<double> TMultiAssembler::offdiag_residuals(int n, int p) const {
    ensure_stacked();
    Eigen::MatrixXcd rhs = expanded_column_channel(n, p);
    Eigen::MatrixXcd x = stacked_.solve(rhs);
    if (!x.array().isFinite().all())
        throw SingularChannelError("stacked channel solve produced non-finite values");
    std::vector<double> res(static_cast<std::size_t>(chan_.M), 0.0);
    for (int q = 0; q < chan_.M; ++q) {
        for (long long a = 0; a < chan_.tau; ++a)
            for (long long b = 0; b < chan_.tau; ++b) {
                if (a == b) continue;
                double mag = std::abs(x(static_cast<long long>(q) * chan_.tau + a, b));
                if (mag > res[static_cast<std::size_t>(q)]) res[static_cast<std::size_t>(q)] = mag;
            }
    }
    return res;
}

double TMultiAssembler::reconstruction_residual(int n, int p) const {
    const int M = chan_.M;
    auto diag = diagonals(n, p);
    // Rebuild H~_{jn,p} as H~_{jm,1:M} * blockdiag stack of the diagonals.
    Eigen::MatrixXcd rebuilt = Eigen::MatrixXcd::Zero(M * chan_.tau, chan_.tau);
    for (long long t = 1; t <= chan_.tau; ++t) {
        Eigen::VectorXcd x(M);
        for (int q = 0; q < M; ++q) x(q) = diag[static_cast<std::size_t>(q)](t - 1);
        Eigen::VectorXcd col = chan_.matrix(j_, m_, t) * x;
        for (int r = 0; r < M; ++r) rebuilt((t - 1) * M + r, t - 1) = col(r);
    }
    Eigen::MatrixXcd target = expanded_column_channel(n, p);
    return (rebuilt - target).cwiseAbs().maxCoeff();
}

AlignmentOperator assemble_T_multi(const ChannelRealization& chan, int m, int n, int p, int q,
                                   int j) {
    TMultiAssembler assembler(chan, j, m);
    AlignmentOperator op;
    op.m = m;
    op.n = n;
    op.j = j;
    op.p = p;
    op.q = q;
    op.diag = assembler.diagonals(n, p)[static_cast<std::size_t>(q) - 1];
    op.offdiag_residual = assembler.offdiag_residuals(n, p)[static_cast<std::size_t>(q) - 1];
    return op;
}

} // namespace dofalign
