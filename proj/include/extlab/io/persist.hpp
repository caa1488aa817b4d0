#pragma once

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "extlab/core/field.hpp"
#include "extlab/errors.hpp"
#include "extlab/evolution/relative.hpp"
#include "extlab/io/csv.hpp"
#include "extlab/merlezaag/modesystem.hpp"
#include "extlab/pipeline/split.hpp"
#include "extlab/spectrum/eigen.hpp"

namespace extlab {

// ---------------------------------------------------------------- profile --
// Columns: x[,y],V,dist.  The y column appears exactly when the mesh carries
// second coordinates.

struct ProfileTable {
    std::vector<double> x, y, V, dist;
    bool two_d = false;
};

inline void persist_profile(const Field& V, const std::filesystem::path& path) {
    if (!V.mesh || V.size() == 0)
        throw PreconditionViolated("profile field is empty");
    const Mesh& mesh = *V.mesh;
    const bool two_d = !mesh.cy.empty();
    CsvTable table;
    table.header = two_d ? std::vector<std::string>{"x", "y", "V", "dist"}
                         : std::vector<std::string>{"x", "V", "dist"};
    table.rows.reserve(static_cast<std::size_t>(V.size()));
    for (int i = 0; i < V.size(); ++i) {
        std::vector<std::string> row;
        row.push_back(format_real(mesh.cx[i]));
        if (two_d)
            row.push_back(format_real(mesh.cy[i]));
        row.push_back(format_real(V.v[i]));
        row.push_back(format_real(mesh.bdist[i]));
        table.rows.push_back(std::move(row));
    }
    write_csv(table, path);
}

inline ProfileTable load_profile(const std::filesystem::path& path) {
    const CsvTable table = read_csv(path);
    ProfileTable out;
    if (table.header == std::vector<std::string>{"x", "y", "V", "dist"})
        out.two_d = true;
    else if (table.header != std::vector<std::string>{"x", "V", "dist"})
        require_header(table, {"x", "V", "dist"}, "profile");
    for (const auto& row : table.rows) {
        std::size_t j = 0;
        out.x.push_back(parse_real(row[j++]));
        if (out.two_d)
            out.y.push_back(parse_real(row[j++]));
        out.V.push_back(parse_real(row[j++]));
        out.dist.push_back(parse_real(row[j++]));
    }
    if (out.x.empty())
        throw SchemaMismatch("profile has no rows: " + path.string());
    return out;
}

// Rebuilds a Field from a loaded profile, checking that the coordinates and
// boundary distances match the mesh the caller reconstructed from its config.
inline Field attach_profile(const ProfileTable& table,
                            std::shared_ptr<const Mesh> mesh) {
    if (static_cast<int>(table.x.size()) != mesh->cells() ||
        table.two_d != !mesh->cy.empty())
        throw MeshMismatch("profile size does not match the configured mesh");
    for (std::size_t i = 0; i < table.x.size(); ++i) {
        const double scale = std::abs(mesh->cx[i]) + 1.0;
        if (std::abs(table.x[i] - mesh->cx[i]) > 1e-12 * scale ||
            std::abs(table.dist[i] - mesh->bdist[static_cast<int>(i)]) > 1e-12 * scale)
            throw MeshMismatch("profile coordinates disagree with the configured mesh");
        if (table.two_d && std::abs(table.y[i] - mesh->cy[i]) > 1e-12 * scale)
            throw MeshMismatch("profile coordinates disagree with the configured mesh");
    }
    Field f;
    f.v = Eigen::Map<const Eigen::VectorXd>(table.V.data(),
                                            static_cast<Eigen::Index>(table.V.size()));
    f.mesh = std::move(mesh);
    return f;
}

// --------------------------------------------------------------- spectrum --
// spectrum.csv columns: index,lambda,class with class in {u,c,s}; each
// eigenfield goes to eigen_<i>.csv with columns x[,y],value in the same
// directory.

struct SpectrumTable {
    std::vector<int> index;
    std::vector<double> lambda;
    std::vector<char> cls;
};

inline char mode_class(const SpectralDecomposition& dec, int i) {
    if (i < dec.I)
        return 'u';
    if (i < dec.I + dec.K)
        return 'c';
    return 's';
}

inline void persist_field_values(const Field& f, const std::filesystem::path& path,
                                 const std::string& value_name) {
    const Mesh& mesh = *f.mesh;
    const bool two_d = !mesh.cy.empty();
    CsvTable table;
    table.header = two_d ? std::vector<std::string>{"x", "y", value_name}
                         : std::vector<std::string>{"x", value_name};
    for (int i = 0; i < f.size(); ++i) {
        std::vector<std::string> row;
        row.push_back(format_real(mesh.cx[i]));
        if (two_d)
            row.push_back(format_real(mesh.cy[i]));
        row.push_back(format_real(f.v[i]));
        table.rows.push_back(std::move(row));
    }
    write_csv(table, path);
}

inline void persist_spectrum(const SpectralDecomposition& dec,
                             const std::filesystem::path& dir) {
    if (dec.eigenvalues.empty())
        throw PreconditionViolated("decomposition has no modes");
    CsvTable table;
    table.header = {"index", "lambda", "class"};
    for (std::size_t i = 0; i < dec.eigenvalues.size(); ++i)
        table.rows.push_back({std::to_string(i), format_real(dec.eigenvalues[i]),
                              std::string(1, mode_class(dec, static_cast<int>(i)))});
    write_csv(table, dir / "spectrum.csv");
    for (std::size_t i = 0; i < dec.eigenfields.size(); ++i)
        persist_field_values(dec.eigenfields[i],
                             dir / ("eigen_" + std::to_string(i) + ".csv"), "value");
}

inline SpectrumTable load_spectrum(const std::filesystem::path& csv_path) {
    const CsvTable table = read_csv(csv_path);
    require_header(table, {"index", "lambda", "class"}, "spectrum");
    SpectrumTable out;
    for (const auto& row : table.rows) {
        out.index.push_back(static_cast<int>(parse_integer(row[0])));
        out.lambda.push_back(parse_real(row[1]));
        if (row[2] != "u" && row[2] != "c" && row[2] != "s")
            throw SchemaMismatch("mode class must be u, c or s, got '" + row[2] + "'");
        out.cls.push_back(row[2][0]);
    }
    if (out.index.empty())
        throw SchemaMismatch("spectrum has no rows: " + csv_path.string());
    return out;
}

// ------------------------------------------------------------- trajectory --
// Columns: t,norm_p1,norm_inf,energy and optionally the mode coefficients
// y_0..y_J.  The plain form writes one row per recorded step; the coefficient
// form writes one row per snapshot, since that is where projections live.

struct TrajectoryTable {
    std::vector<double> t, norm_p1, norm_inf, energy;
    std::vector<std::vector<double>> coeffs; // per row, empty without y columns
};

namespace detail {

inline std::vector<std::string> trajectory_header(std::size_t num_coeffs) {
    std::vector<std::string> h{"t", "norm_p1", "norm_inf", "energy"};
    for (std::size_t j = 0; j < num_coeffs; ++j)
        h.push_back("y_" + std::to_string(j));
    return h;
}

} // namespace detail

inline void persist_trajectory(const Trajectory& traj,
                               const std::filesystem::path& path) {
    if (traj.times.empty())
        throw EmptyTrajectory("nothing to persist");
    CsvTable table;
    table.header = detail::trajectory_header(0);
    for (std::size_t k = 0; k < traj.times.size(); ++k)
        table.rows.push_back({format_real(traj.times[k]),
                              format_real(traj.norm_series[k]),
                              format_real(traj.sup_series[k]),
                              format_real(traj.energy_series[k])});
    write_csv(table, path);
}

inline void persist_trajectory(const Trajectory& traj, const SubspaceSplit& split,
                               const std::filesystem::path& path) {
    if (split.times.empty())
        throw EmptyTrajectory("nothing to persist");
    const std::size_t J = split.coefficients.front().size();
    CsvTable table;
    table.header = detail::trajectory_header(J);
    for (std::size_t k = 0; k < split.times.size(); ++k) {
        const int step = traj.snapshot_steps[k];
        std::vector<std::string> row{format_real(split.times[k]),
                                     format_real(traj.norm_series[step]),
                                     format_real(traj.sup_series[step]),
                                     format_real(traj.energy_series[step])};
        for (double c : split.coefficients[k])
            row.push_back(format_real(c));
        table.rows.push_back(std::move(row));
    }
    write_csv(table, path);
}

inline TrajectoryTable load_trajectory(const std::filesystem::path& path) {
    const CsvTable table = read_csv(path);
    if (table.header.size() < 4)
        throw SchemaMismatch("trajectory needs at least t,norm_p1,norm_inf,energy");
    const std::size_t J = table.header.size() - 4;
    if (table.header != detail::trajectory_header(J))
        require_header(table, detail::trajectory_header(J), "trajectory");
    TrajectoryTable out;
    for (const auto& row : table.rows) {
        out.t.push_back(parse_real(row[0]));
        out.norm_p1.push_back(parse_real(row[1]));
        out.norm_inf.push_back(parse_real(row[2]));
        out.energy.push_back(parse_real(row[3]));
        std::vector<double> c;
        for (std::size_t j = 4; j < row.size(); ++j)
            c.push_back(parse_real(row[j]));
        out.coeffs.push_back(std::move(c));
    }
    if (out.t.empty())
        throw SchemaMismatch("trajectory has no rows: " + path.string());
    return out;
}

// ------------------------------------------------------------- modeseries --
// Columns: s,X,Y,Z.

inline void persist_modeseries(const ModeSeries& series,
                               const std::filesystem::path& path) {
    if (series.size() == 0)
        throw PreconditionViolated("mode series is empty");
    CsvTable table;
    table.header = {"s", "X", "Y", "Z"};
    for (std::size_t k = 0; k < series.size(); ++k)
        table.rows.push_back({format_real(series.s[k]), format_real(series.X[k]),
                              format_real(series.Y[k]), format_real(series.Z[k])});
    write_csv(table, path);
}

inline ModeSeries load_modeseries(const std::filesystem::path& path) {
    const CsvTable table = read_csv(path);
    require_header(table, {"s", "X", "Y", "Z"}, "modeseries");
    ModeSeries out;
    for (const auto& row : table.rows) {
        out.s.push_back(parse_real(row[0]));
        out.X.push_back(parse_real(row[1]));
        out.Y.push_back(parse_real(row[2]));
        out.Z.push_back(parse_real(row[3]));
    }
    if (out.s.empty())
        throw SchemaMismatch("mode series has no rows: " + path.string());
    return out;
}

} // namespace extlab
