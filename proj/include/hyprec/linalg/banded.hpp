#pragma once

#include <span>
#include <vector>

#include "hyprec/linalg/csr.hpp"

namespace hyprec {

/// LU with partial pivoting in band storage. Structured-mesh operators
/// have bandwidth about n^((d-1)/d), which keeps direct solves on the
/// training meshes cheap. Throws SingularMatrixError on a vanishing pivot.
class BandedLu {
public:
    explicit BandedLu(const CsrMatrix& a);

    std::size_t size() const { return n_; }
    std::size_t lower_bandwidth() const { return kl_; }
    std::size_t upper_bandwidth() const { return ku_; }
    Vector solve(std::span<const double> b) const;

private:
    double& at(std::size_t i, std::size_t j) { return band_[i * width_ + (j + kl_ - i)]; }
    double at(std::size_t i, std::size_t j) const { return band_[i * width_ + (j + kl_ - i)]; }

    std::size_t n_ = 0, kl_ = 0, ku_ = 0, width_ = 0;
    std::vector<double> band_;
    std::vector<std::size_t> piv_;
};

} // namespace hyprec
