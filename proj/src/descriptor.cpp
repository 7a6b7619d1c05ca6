#include "smatch/descriptor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <Eigen/SVD>

namespace smatch {

namespace {

/// incident[v] = indices of the simplices in `list` that contain vertex v.
std::vector<std::vector<int>> vertex_incidence(const std::vector<Simplex>& list, std::size_t n_vertices) {
    std::vector<std::vector<int>> incident(n_vertices);
    for (std::size_t s = 0; s < list.size(); ++s)
        for (int v : list[s]) incident[v].push_back(static_cast<int>(s));
    return incident;
}

std::vector<int> gather(const Simplex& s, const std::vector<std::vector<int>>& incident, int exclude) {
    std::vector<int> out;
    for (int v : s) out.insert(out.end(), incident[v].begin(), incident[v].end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    if (exclude >= 0) std::erase(out, exclude);
    return out;
}

}  // namespace

NeighborhoodIndex build_neighborhoods(const SkeletonComplex& complex, int p) {
    if (p < 1 || p > complex.h) throw InvalidArgument("neighbourhood level out of range");
    const auto& upper = complex.simplices[p];
    const auto& lower = complex.simplices[p - 1];
    const auto up_inc = vertex_incidence(upper, complex.vertices.size());
    const auto low_inc = vertex_incidence(lower, complex.vertices.size());

    NeighborhoodIndex idx;
    idx.p = p;
    idx.upper_to_upper.resize(upper.size());
    idx.upper_to_lower.resize(upper.size());
    for (std::size_t i = 0; i < upper.size(); ++i) {
        idx.upper_to_upper[i] = gather(upper[i], up_inc, static_cast<int>(i));
        idx.upper_to_lower[i] = gather(upper[i], low_inc, -1);
    }
    idx.lower_to_lower.resize(lower.size());
    idx.lower_to_upper.resize(lower.size());
    for (std::size_t i = 0; i < lower.size(); ++i) {
        idx.lower_to_lower[i] = gather(lower[i], low_inc, static_cast<int>(i));
        idx.lower_to_upper[i] = gather(lower[i], up_inc, -1);
    }
    return idx;
}

AffineDescriptor affine_weights(const Vec3& target, std::span<const Vec3> neighbor_barycenters) {
    const auto n = static_cast<Eigen::Index>(neighbor_barycenters.size());
    if (n == 0) throw EmptyNeighborhood();

    // With D = [b_i - x] the residual of an affine combination is D w. Writing
    // w = u + v with u = 1/n and v orthogonal to the ones vector reduces the problem
    // to an unconstrained minimum-norm least-squares solve on the centred matrix
    // C = D - mean(D) 1^T, whose pseudo-inverse comes from a thin SVD.
    Eigen::MatrixXd centred(n, 3);
    Vec3 mean = Vec3::Zero();
    for (Eigen::Index i = 0; i < n; ++i) mean += neighbor_barycenters[i] - target;
    mean /= static_cast<double>(n);
    for (Eigen::Index i = 0; i < n; ++i) centred.row(i) = (neighbor_barycenters[i] - target - mean).transpose();

    Eigen::VectorXd w = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    if (n > 1) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(centred, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& s = svd.singularValues();
        const double cutoff = 1e-10 * (s.size() > 0 ? s(0) : 0.0);
        Eigen::VectorXd coeff = svd.matrixV().transpose() * mean;
        for (Eigen::Index i = 0; i < s.size(); ++i) coeff(i) = s(i) > cutoff ? coeff(i) / s(i) : 0.0;
        w -= svd.matrixU() * coeff;
    }

    AffineDescriptor out;
    out.weights.assign(w.data(), w.data() + n);
    Vec3 combo = Vec3::Zero();
    for (Eigen::Index i = 0; i < n; ++i) combo += w(i) * neighbor_barycenters[i];
    out.residual = (combo - target).norm();
    out.support.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) out.support[i] = static_cast<int>(i);
    out.canonical = out.weights;
    std::sort(out.canonical.begin(), out.canonical.end(), std::greater<>());
    return out;
}

double descriptor_distance(const AffineDescriptor& a, const AffineDescriptor& b) {
    if (a.dimension != b.dimension) throw DimensionMismatch(a.dimension, b.dimension);
    const auto& x = a.canonical;
    const auto& y = b.canonical;
    const std::size_t common = std::min(x.size(), y.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < common; ++i) sum += (x[i] - y[i]) * (x[i] - y[i]);
    for (std::size_t i = common; i < x.size(); ++i) sum += x[i] * x[i];
    for (std::size_t i = common; i < y.size(); ++i) sum += y[i] * y[i];
    return std::sqrt(sum);
}

LevelDescriptors compute_descriptors(const SkeletonComplex& complex, int p) {
    return compute_descriptors(complex, build_neighborhoods(complex, p));
}

LevelDescriptors compute_descriptors(const SkeletonComplex& complex, const NeighborhoodIndex& nbrs) {
    const int p = nbrs.p;
    const auto& upper = complex.simplices[p];
    const auto& lower = complex.simplices[p - 1];
    const int rows = static_cast<int>(lower.size());

    std::vector<Vec3> up_bary(upper.size());
    std::vector<Vec3> low_bary(lower.size());
    for (std::size_t i = 0; i < upper.size(); ++i) up_bary[i] = complex.barycenter_of(upper[i]);
    for (std::size_t i = 0; i < lower.size(); ++i) low_bary[i] = complex.barycenter_of(lower[i]);

    auto describe = [&](const Vec3& target, int dimension, const std::vector<int>& low_nbrs,
                        const std::vector<int>& up_nbrs) {
        AffineDescriptor d;
        if (low_nbrs.empty() && up_nbrs.empty()) {
            d.dimension = dimension;
            return d;
        }
        std::vector<Vec3> bary;
        std::vector<int> support;
        bary.reserve(low_nbrs.size() + up_nbrs.size());
        for (int i : low_nbrs) {
            bary.push_back(low_bary[i]);
            support.push_back(i);
        }
        for (int j : up_nbrs) {
            bary.push_back(up_bary[j]);
            support.push_back(rows + j);
        }
        d = affine_weights(target, bary);
        d.dimension = dimension;
        d.support = std::move(support);
        return d;
    };

    LevelDescriptors out;
    out.p = p;
    out.upper.reserve(upper.size());
    for (std::size_t i = 0; i < upper.size(); ++i)
        out.upper.push_back(describe(up_bary[i], p, nbrs.upper_to_lower[i], nbrs.upper_to_upper[i]));
    out.lower.reserve(lower.size());
    for (std::size_t i = 0; i < lower.size(); ++i)
        out.lower.push_back(describe(low_bary[i], p - 1, nbrs.lower_to_lower[i], nbrs.lower_to_upper[i]));
    return out;
}

}  // namespace smatch
