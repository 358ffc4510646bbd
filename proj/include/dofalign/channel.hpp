#pragma once

#include "dofalign/demand.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <vector>

namespace dofalign {

struct ChannelBounds {
    double lo = 0.5;
    double hi = 2.0;
};

// Counter-based deterministic generator (SplitMix64 finalizer chain). Every
// draw is a pure function of (seed, stream, counter), so generation order
// never matters and streams are independent by construction.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    double uniform(std::uint64_t stream, std::uint64_t counter) const;

    /// Magnitude uniform on [lo, hi], phase uniform on [0, 2*pi); consumes
    /// counters 2c and 2c+1.
    std::complex<double> bounded_complex(std::uint64_t stream, std::uint64_t counter,
                                         const ChannelBounds& bounds) const;

private:
    std::uint64_t seed_;
};

// Seeded time-varying channel: one complex M x M matrix per (receiver j,
// transmitter k, time t). Entry magnitudes stay within the configured bounds.
struct ChannelRealization {
    int K = 0;
    int J = 0;
    int M = 1;
    long long tau = 0;
    std::uint64_t seed = 0;
    ChannelBounds bounds;
    std::vector<std::complex<double>> entries;

    std::complex<double> scalar(int j, int k, long long t) const {
        return entries[index(j, k, t, 0, 0)];
    }
    std::complex<double> entry(int j, int k, long long t, int row, int col) const {
        return entries[index(j, k, t, row, col)];
    }
    Eigen::MatrixXcd matrix(int j, int k, long long t) const;

    std::size_t index(int j, int k, long long t, int row, int col) const {
        return static_cast<std::size_t>(
            ((((static_cast<long long>(j - 1) * K + (k - 1)) * tau + (t - 1)) * M + row) * M) +
            col);
    }
};

ChannelRealization generate_channels(const DemandSpec& spec, long long tau, std::uint64_t seed,
                                     const ChannelBounds& bounds = {});

// Random base vectors w_1..w_count of length tau, drawn from a stream
// independent of the channel stream.
struct BaseVectors {
    long long tau = 0;
    std::uint64_t seed = 0;
    std::vector<Eigen::VectorXcd> w;
};

BaseVectors generate_base_vectors(long long tau, int count, std::uint64_t seed,
                                  const ChannelBounds& bounds = {});

// Diagonal of one alignment operator plus, for the multi-antenna extraction,
// the largest off-diagonal magnitude observed in the dense block.
struct AlignmentOperator {
    int m = 0;
    int n = 0;
    int j = 0;
    int p = 0;  // 0 in the single-antenna case
    int q = 0;
    Eigen::VectorXcd diag;
    double offdiag_residual = 0.0;
};

/// Single-antenna operator: diag[t] = H_{jn}(t) / H_{jm}(t). The magnitude
/// bounds keep every entry inside [lo/hi, hi/lo].
AlignmentOperator assemble_T(const ChannelRealization& chan, int m, int n, int j);

// Multi-antenna extraction for a fixed (receiver j, aligned-to message m).
// diagonals() exploits the per-time-instant structure (tau independent M x M
// solves); offdiag_residuals() and the reconstruction check go through the
// dense Mtau x Mtau stacked system so the claimed block-diagonality is
// actually measured rather than assumed.
class TMultiAssembler {
public:
    TMultiAssembler(const ChannelRealization& chan, int j, int m);

    /// Diagonals of T_{m,n,p,q} for q = 1..M. Throws SingularChannelError when
    /// some per-instant channel matrix is singular.
    std::vector<Eigen::VectorXcd> diagonals(int n, int p) const;

    /// Max off-diagonal magnitude of each q block of the dense inverse product.
    std::vector<double> offdiag_residuals(int n, int p) const;

    /// Max-norm error of rebuilding the time-expanded column channel of
    /// (n, p) from the extracted diagonal blocks.
    double reconstruction_residual(int n, int p) const;

private:
    const ChannelRealization& chan_;
    int j_;
    int m_;
    std::vector<Eigen::FullPivLU<Eigen::MatrixXcd>> per_instant_;  // H_{jm}(t) factors
    mutable Eigen::PartialPivLU<Eigen::MatrixXcd> stacked_;        // dense, built lazily
    mutable bool stacked_ready_ = false;

    void ensure_stacked() const;
    Eigen::MatrixXcd expanded_column_channel(int n, int p) const;  // Mtau x tau
};

/// One (m, n, p, q, j) operator with its off-diagonal residual filled in.
AlignmentOperator assemble_T_multi(const ChannelRealization& chan, int m, int n, int p, int q,
                                   int j);

} // namespace dofalign
