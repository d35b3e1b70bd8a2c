#include "hyprec/onet/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hyprec::onet {

ModelTrunkBasis::ModelTrunkBasis(std::shared_ptr<const OnetModel> model) : model_(std::move(model)) {
    if (!model_) throw std::invalid_argument("ModelTrunkBasis: null model");
}

DenseMatrix ModelTrunkBasis::eval(const DenseMatrix& points) const {
    return trunk_eval(*model_, points);
}

std::string ModelTrunkBasis::id() const { return model_->id.empty() ? "onet" : model_->id; }

SineBasis::SineBasis(int dim, std::size_t p) : dim_(dim) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("SineBasis: dim must be 1, 2 or 3");
    if (p == 0) throw std::invalid_argument("SineBasis: p must be positive");
    // Grow the index cube until the ball of radius m holds p modes; every
    // mode with |m|^2 <= m^2 then lies inside the cube.
    std::size_t m = 1;
    auto count_ball = [&](std::size_t r) {
        std::size_t c = 0;
        const std::size_t r2 = r * r;
        for (std::size_t i = 1; i <= r; ++i)
            for (std::size_t j = 1; j <= (dim > 1 ? r : 1); ++j)
                for (std::size_t k = 1; k <= (dim > 2 ? r : 1); ++k)
                    if (i * i + (dim > 1 ? j * j : 0) + (dim > 2 ? k * k : 0) <= r2) ++c;
        return c;
    };
    while (count_ball(m) < p) ++m;
    std::vector<std::array<std::size_t, 3>> all;
    for (std::size_t i = 1; i <= m; ++i)
        for (std::size_t j = 1; j <= (dim > 1 ? m : 1); ++j)
            for (std::size_t k = 1; k <= (dim > 2 ? m : 1); ++k)
                all.push_back({i, dim > 1 ? j : 0, dim > 2 ? k : 0});
    auto norm2 = [](const std::array<std::size_t, 3>& a) {
        return a[0] * a[0] + a[1] * a[1] + a[2] * a[2];
    };
    std::stable_sort(all.begin(), all.end(),
                     [&](const auto& a, const auto& b) { return norm2(a) < norm2(b); });
    modes_.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(p));
}

DenseMatrix SineBasis::eval(const DenseMatrix& points) const {
    if (static_cast<int>(points.cols()) != dim_)
        throw std::invalid_argument("SineBasis: points have the wrong dimension");
    DenseMatrix out(points.rows(), modes_.size());
    for (std::size_t r = 0; r < points.rows(); ++r) {
        bool boundary = false;
        for (int a = 0; a < dim_; ++a)
            boundary = boundary || points(r, a) <= 0.0 || points(r, a) >= 1.0;
        if (boundary) continue;
        for (std::size_t j = 0; j < modes_.size(); ++j) {
            double v = 1.0;
            for (int a = 0; a < dim_; ++a)
                v *= std::sin(static_cast<double>(modes_[j][a]) * std::numbers::pi * points(r, a));
            out(r, j) = v;
        }
    }
    return out;
}

std::string SineBasis::id() const {
    return "sine(d=" + std::to_string(dim_) + ",p=" + std::to_string(modes_.size()) + ")";
}

} // namespace hyprec::onet
