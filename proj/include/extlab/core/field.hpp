#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>

#include "extlab/core/mesh.hpp"
#include "extlab/errors.hpp"

namespace extlab {

// One real value per cell, tied to the mesh it lives on.
struct Field {
    std::shared_ptr<const Mesh> mesh;
    Eigen::VectorXd v;

    int size() const { return static_cast<int>(v.size()); }
};

inline Field make_field(std::shared_ptr<const Mesh> mesh, double value = 0.0) {
    Field f;
    f.v = Eigen::VectorXd::Constant(mesh->cells(), value);
    f.mesh = std::move(mesh);
    return f;
}

inline Field make_field(std::shared_ptr<const Mesh> mesh,
                        const std::function<double(double)>& fn) {
    Field f;
    f.v.resize(mesh->cells());
    for (int i = 0; i < mesh->cells(); ++i)
        f.v[i] = fn(mesh->cx[i]);
    f.mesh = std::move(mesh);
    return f;
}

inline Field make_field(std::shared_ptr<const Mesh> mesh,
                        const std::function<double(double, double)>& fn) {
    Field f;
    f.v.resize(mesh->cells());
    const bool has_y = !mesh->cy.empty();
    for (int i = 0; i < mesh->cells(); ++i)
        f.v[i] = fn(mesh->cx[i], has_y ? mesh->cy[i] : 0.0);
    f.mesh = std::move(mesh);
    return f;
}

inline void require_same_mesh(const Field& a, const Field& b) {
    if (!a.mesh || !b.mesh || !same_mesh(*a.mesh, *b.mesh))
        throw MeshMismatch("fields live on different meshes");
}

} // namespace extlab
