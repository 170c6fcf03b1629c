#ifndef DLCQ_KERNEL_HPP
#define DLCQ_KERNEL_HPP

#include "dlcq/fock.hpp"

namespace dlcq::kernel {

/// a <- exp(-i angle P) a, P = i^y X^x Z^z, over `dim` interleaved complex
/// amplitudes. Kept free of Eigen so this unit can take its own ISA flags.
void rotate(double* a, BasisIndex dim, BasisIndex x, BasisIndex z, int y_count, double angle);

/// Several commuting strings sharing the flip mask x, applied as one pass.
/// Relative to the lead string (x, z, y), string r carries an extra sign
/// (-1)^{|i & d[r]|}; bit r of the pattern holds that parity (xor
/// pattern_flip) and cs[2p], cs[2p+1] are cos and sin of the summed angle.
void rotate_fused(double* a, BasisIndex dim, BasisIndex x, BasisIndex z, int y_count, const BasisIndex* d, int m,
                  const double* cs, unsigned pattern_flip);

}  // namespace dlcq::kernel

#endif  // DLCQ_KERNEL_HPP
