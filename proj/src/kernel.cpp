#include "kernel.hpp"

#include <bit>
#include <cmath>

// Clone the hot loops for AVX2 where the toolchain can dispatch at load time.
#if defined(__GNUC__) && !defined(__clang__) && defined(__x86_64__) && defined(__linux__)
#define DLCQ_CLONES __attribute__((target_clones("arch=haswell", "default")))
#else
#define DLCQ_CLONES
#endif

namespace dlcq::kernel {

namespace {

inline double parity_sign(BasisIndex v) { return (std::popcount(v) & 1) ? -1.0 : 1.0; }

// p <- (c - i s) p over n amplitudes.
inline void phase_run(double* p, BasisIndex n, double c, double s) {
    for (BasisIndex t = 0; t < n; ++t) {
        const double re = p[2 * t], im = p[2 * t + 1];
        p[2 * t] = c * re + s * im;
        p[2 * t + 1] = c * im - s * re;
    }
}

// (pi, pj) <- (c pi + mj pj, c pj + mi pi) over n amplitude pairs.
inline void mix_run(double* pi, double* pj, BasisIndex n, double c, double mir, double mii, double mjr,
                    double mji) {
    for (BasisIndex t = 0; t < n; ++t) {
        const double ir = pi[2 * t], ii = pi[2 * t + 1];
        const double jr = pj[2 * t], ji = pj[2 * t + 1];
        pi[2 * t] = c * ir + (mjr * jr - mji * ji);
        pi[2 * t + 1] = c * ii + (mjr * ji + mji * jr);
        pj[2 * t] = c * jr + (mir * ir - mii * ii);
        pj[2 * t + 1] = c * ji + (mir * ii + mii * ir);
    }
}

}  // namespace

// Plain doubles: std::complex products take the NaN-checking slow path.
// Below the lowest bit of x|z every coefficient is constant, so the index
// space is cut into such runs and each run is a straight vector loop.
DLCQ_CLONES
void rotate(double* a, BasisIndex dim, BasisIndex x, BasisIndex z, int y_count, double angle) {
    const double c = std::cos(angle);
    const double s = (y_count & 2) ? -std::sin(angle) : std::sin(angle);
    const BasisIndex touched = x | z;
    const BasisIndex run = touched ? std::min<BasisIndex>(touched & -touched, dim) : dim;
    if (x == 0) {
        // diagonal: exp(-i angle (+-1)); y_count 2 carries an overall sign
        for (BasisIndex base = 0; base < dim; base += run) phase_run(a + 2 * base, run, c, parity_sign(base & z) * s);
        return;
    }
    // P|j> = i^y (-1)^{|j&z|} |j^x>, so (P psi)_i = i^y (-1)^{|(i^x)&z|} psi_{i^x}.
    // mix = -i sin * i^(y mod 2), the i^2 part already folded into s.
    double mr = 0.0, mi = -s;
    if (y_count & 1) {
        mr = s;
        mi = 0.0;
    }
    const double y_sign = (y_count & 1) ? -1.0 : 1.0;  // |j&z| = |i&z| + |x&z| mod 2
    const BasisIndex high = std::bit_floor(x);
    const BasisIndex below = high - 1;
    const BasisIndex bases = dim / (2 * run);
    for (BasisIndex k = 0; k < bases; ++k) {
        const BasisIndex idx = k * run;
        const BasisIndex i = ((idx & ~below) << 1) | (idx & below);
        const double si = parity_sign(i & z);
        const double sj = si * y_sign;
        mix_run(a + 2 * i, a + 2 * (i ^ x), run, c, si * mr, si * mi, sj * mr, sj * mi);
    }
}

DLCQ_CLONES
void rotate_fused(double* a, BasisIndex dim, BasisIndex x, BasisIndex z, int y_count, const BasisIndex* d, int m,
                  const double* cs, unsigned pattern_flip) {
    BasisIndex touched = x | z;
    for (int r = 0; r < m; ++r) touched |= d[r];
    const BasisIndex run = std::min<BasisIndex>(touched & -touched, dim);
    const double s_sign = (y_count & 2) ? -1.0 : 1.0;
    const auto pattern = [&](BasisIndex i) {
        unsigned p = pattern_flip;
        for (int r = 0; r < m; ++r) p ^= static_cast<unsigned>(std::popcount(i & d[r]) & 1) << r;
        return p;
    };
    if (x == 0) {
        for (BasisIndex base = 0; base < dim; base += run) {
            const unsigned p = pattern(base);
            phase_run(a + 2 * base, run, cs[2 * p], parity_sign(base & z) * s_sign * cs[2 * p + 1]);
        }
        return;
    }
    const double y_sign = (y_count & 1) ? -1.0 : 1.0;
    const BasisIndex high = std::bit_floor(x);
    const BasisIndex below = high - 1;
    const BasisIndex bases = dim / (2 * run);
    for (BasisIndex k = 0; k < bases; ++k) {
        const BasisIndex idx = k * run;
        const BasisIndex i = ((idx & ~below) << 1) | (idx & below);
        const unsigned p = pattern(i);
        const double s = s_sign * cs[2 * p + 1];
        double mr = 0.0, mi = -s;
        if (y_count & 1) {
            mr = s;
            mi = 0.0;
        }
        const double si = parity_sign(i & z);
        const double sj = si * y_sign;
        mix_run(a + 2 * i, a + 2 * (i ^ x), run, cs[2 * p], si * mr, si * mi, sj * mr, sj * mi);
    }
}

}  // namespace dlcq::kernel
