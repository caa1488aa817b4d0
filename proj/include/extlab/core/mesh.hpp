#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include "extlab/core/domain.hpp"
#include "extlab/errors.hpp"

namespace extlab {

// A face either joins two cells (right >= 0) or one cell and the boundary
// (right == -1).  "area" is the transversal measure of the face and "dist"
// the center-to-center (or center-to-boundary) distance used for gradients.
struct Face {
    int left;
    int right;
    double area;
    double dist;
};

struct Mesh {
    DomainSpec domain;
    int nx = 0; // cells along x / r
    int ny = 1; // cells along y / theta (1 for one-dimensional meshes)
    double dx = 0.0;
    double dy = 0.0; // dtheta for the annulus
    std::vector<double> cx, cy; // cell center coordinates (cy empty in 1D; annulus stores Cartesian)
    Eigen::VectorXd measure; // per-cell volume, includes radial Jacobians
    Eigen::VectorXd bdist;   // Euclidean distance from cell center to the boundary
    std::vector<Face> faces;

    int cells() const { return nx * ny; }
};

inline bool same_mesh(const Mesh& a, const Mesh& b) {
    return &a == &b ||
           (same_domain(a.domain, b.domain) && a.nx == b.nx && a.ny == b.ny);
}

namespace detail {

inline std::shared_ptr<const Mesh> mesh_interval(const Interval& d, int res) {
    auto m = std::make_shared<Mesh>();
    m->domain = d;
    m->nx = res;
    m->dx = (d.b - d.a) / res;
    m->measure.resize(res);
    m->bdist.resize(res);
    m->cx.resize(res);
    for (int i = 0; i < res; ++i) {
        const double x = d.a + (i + 0.5) * m->dx;
        m->cx[i] = x;
        m->measure[i] = m->dx;
        m->bdist[i] = std::min(x - d.a, d.b - x);
    }
    for (int i = 0; i + 1 < res; ++i)
        m->faces.push_back({i, i + 1, 1.0, m->dx});
    m->faces.push_back({0, -1, 1.0, 0.5 * m->dx});
    m->faces.push_back({res - 1, -1, 1.0, 0.5 * m->dx});
    return m;
}

inline std::shared_ptr<const Mesh> mesh_ball(const RadialBall& d, int res) {
    // One-dimensional radial mesh on (0,R); measure carries the full angular
    // factor so cell volumes sum to the ball volume.  No face sits at r=0:
    // the flux r^{n-1} u'(r) vanishes there for regular data.
    const double omega = d.n == 1 ? 2.0 : 2.0 * std::numbers::pi;
    auto m = std::make_shared<Mesh>();
    m->domain = d;
    m->nx = res;
    m->dx = d.R / res;
    m->measure.resize(res);
    m->bdist.resize(res);
    m->cx.resize(res);
    for (int i = 0; i < res; ++i) {
        const double r = (i + 0.5) * m->dx;
        m->cx[i] = r;
        m->measure[i] = omega * std::pow(r, d.n - 1) * m->dx;
        m->bdist[i] = d.R - r;
    }
    for (int i = 0; i + 1 < res; ++i) {
        const double rf = (i + 1) * m->dx;
        m->faces.push_back({i, i + 1, omega * std::pow(rf, d.n - 1), m->dx});
    }
    m->faces.push_back({res - 1, -1, omega * std::pow(d.R, d.n - 1), 0.5 * m->dx});
    return m;
}

inline std::shared_ptr<const Mesh> mesh_rectangle(const Rectangle& d, int res) {
    auto m = std::make_shared<Mesh>();
    m->domain = d;
    m->nx = res;
    m->ny = std::max<int>(8, static_cast<int>(std::lround(res * d.Ly / d.Lx)));
    m->dx = d.Lx / m->nx;
    m->dy = d.Ly / m->ny;
    const int N = m->nx * m->ny;
    m->measure.resize(N);
    m->bdist.resize(N);
    m->cx.resize(N);
    m->cy.resize(N);
    for (int j = 0; j < m->ny; ++j)
        for (int i = 0; i < m->nx; ++i) {
            const int id = i + m->nx * j;
            const double x = (i + 0.5) * m->dx;
            const double y = (j + 0.5) * m->dy;
            m->cx[id] = x;
            m->cy[id] = y;
            m->measure[id] = m->dx * m->dy;
            m->bdist[id] = std::min({x, d.Lx - x, y, d.Ly - y});
        }
    for (int j = 0; j < m->ny; ++j)
        for (int i = 0; i < m->nx; ++i) {
            const int id = i + m->nx * j;
            if (i + 1 < m->nx)
                m->faces.push_back({id, id + 1, m->dy, m->dx});
            if (j + 1 < m->ny)
                m->faces.push_back({id, id + m->nx, m->dx, m->dy});
            if (i == 0)
                m->faces.push_back({id, -1, m->dy, 0.5 * m->dx});
            if (i == m->nx - 1)
                m->faces.push_back({id, -1, m->dy, 0.5 * m->dx});
            if (j == 0)
                m->faces.push_back({id, -1, m->dx, 0.5 * m->dy});
            if (j == m->ny - 1)
                m->faces.push_back({id, -1, m->dx, 0.5 * m->dy});
        }
    return m;
}

inline std::shared_ptr<const Mesh> mesh_annulus(const Annulus& d, int res) {
    using std::numbers::pi;
    auto m = std::make_shared<Mesh>();
    m->domain = d;
    m->nx = res;
    m->dx = (d.r1 - d.r0) / res;
    // pick the angular count so cells are near-square at mid-radius, rounded
    // to a multiple of 4 to keep the four-fold symmetry axes on the grid
    const double rmid = 0.5 * (d.r0 + d.r1);
    int mt = static_cast<int>(std::lround(2.0 * pi * rmid / m->dx / 4.0)) * 4;
    mt = std::clamp(mt, 16, 512);
    m->ny = mt;
    m->dy = 2.0 * pi / mt;
    const int N = res * mt;
    m->measure.resize(N);
    m->bdist.resize(N);
    m->cx.resize(N);
    m->cy.resize(N);
    for (int j = 0; j < mt; ++j)
        for (int i = 0; i < res; ++i) {
            const int id = i + res * j;
            const double r = d.r0 + (i + 0.5) * m->dx;
            const double th = (j + 0.5) * m->dy;
            m->cx[id] = r * std::cos(th);
            m->cy[id] = r * std::sin(th);
            m->measure[id] = r * m->dx * m->dy;
            m->bdist[id] = std::min(r - d.r0, d.r1 - r);
        }
    for (int j = 0; j < mt; ++j)
        for (int i = 0; i < res; ++i) {
            const int id = i + res * j;
            const double r = d.r0 + (i + 0.5) * m->dx;
            if (i + 1 < res) {
                const double rf = d.r0 + (i + 1) * m->dx;
                m->faces.push_back({id, id + 1, rf * m->dy, m->dx});
            }
            if (i == 0)
                m->faces.push_back({id, -1, d.r0 * m->dy, 0.5 * m->dx});
            if (i == res - 1)
                m->faces.push_back({id, -1, d.r1 * m->dy, 0.5 * m->dx});
            // angular face toward j+1, wrapping periodically
            const int jn = (j + 1) % mt;
            m->faces.push_back({id, i + res * jn, m->dx, r * m->dy});
        }
    return m;
}

} // namespace detail

inline std::shared_ptr<const Mesh> build_mesh(const DomainSpec& spec, int resolution) {
    validate_domain(spec);
    if (resolution < 8)
        throw ResolutionTooCoarse("resolution must be at least 8");
    return std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Interval>)
                return detail::mesh_interval(s, resolution);
            else if constexpr (std::is_same_v<T, RadialBall>)
                return detail::mesh_ball(s, resolution);
            else if constexpr (std::is_same_v<T, Rectangle>)
                return detail::mesh_rectangle(s, resolution);
            else
                return detail::mesh_annulus(s, resolution);
        },
        spec);
}

} // namespace extlab
