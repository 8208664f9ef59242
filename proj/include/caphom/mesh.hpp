#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "common.hpp"
#include "mat3.hpp"

namespace caphom {

/// Triangulation of the cavity sphere extracted from the volume mesh. Nodes
/// lie on the exact sphere; the faceted triangles carry the quadrature
/// weight (areas), the radius stays analytic.
struct SurfacePatch {
    std::vector<std::array<int, 3>> tris; // outward oriented (normal . e_r > 0)
    std::vector<double> tri_areas;
    double area_total = 0.0;
    double radius = 0.0;
    std::vector<int> nodes; // unique cavity node ids, ascending
};

struct MeshBase {
    std::vector<Vec3> nodes;
    std::vector<std::array<int, 4>> tets; // positively oriented
    SurfacePatch cavity;
    double a = 0.0;
    int refine = 0;

    std::size_t node_count() const { return nodes.size(); }
    std::size_t tet_count() const { return tets.size(); }
};

/// Periodic unit cell Y = [-1/2, 1/2)^3 minus the cavity ball. Boundary nodes
/// on opposite faces are listed in pairs (neg, pos, axis) with
/// node[pos] = node[neg] + e_axis; edge and corner nodes appear in several
/// pairs, which encodes their full orbit.
struct PeriodicMesh : MeshBase {
    std::vector<std::array<int, 3>> pairs;
};

/// Box [-L, L]^3 minus the cavity ball, with one face marked for Dirichlet
/// data and the rest traction free.
struct DomainMesh : MeshBase {
    double half_width = 0.0;
    int gamma_axis = 2;
    int gamma_sign = -1;
    std::vector<int> gamma_nodes;
};

inline double tet_volume(const Vec3 &p0, const Vec3 &p1, const Vec3 &p2, const Vec3 &p3) {
    return (p1 - p0).cross(p2 - p0).dot(p3 - p0) / 6.0;
}

// ---------------------------------------------------------------------------
// Block-structured template.
//
// One octant of the cube is meshed by three radial blocks, one per outer
// face: the face's n x n grid is extruded from the cavity sphere (layer 0)
// to the cube surface (layer L) along rays through the origin, with layers
// graded toward the sphere. Each hexahedron splits into the six Freudenthal
// tetrahedra sharing the main diagonal; the block-local axes are chosen so
// every induced quad diagonal is the "increasing" one, which makes the three
// block interfaces conform. The octant is then mirrored across the three
// coordinate planes. Mirror faces are pointwise fixed, so conformity is
// preserved, and opposite cube faces become translation-identical, which
// yields the periodic pairing by construction.
// ---------------------------------------------------------------------------

namespace meshdetail {

struct NodeKey {
    // Cube-surface lattice point (components in [-n, n], scaled by 1/(2n))
    // plus the radial layer. Uniquely identifies a node, shared across
    // blocks and octants.
    int sx, sy, sz, layer;
    bool operator==(const NodeKey &o) const {
        return sx == o.sx && sy == o.sy && sz == o.sz && layer == o.layer;
    }
};

struct NodeKeyHash {
    std::size_t operator()(const NodeKey &k) const {
        std::size_t h = static_cast<std::size_t>(k.sx + 512);
        h = h * 1031 + static_cast<std::size_t>(k.sy + 512);
        h = h * 1031 + static_cast<std::size_t>(k.sz + 512);
        h = h * 1031 + static_cast<std::size_t>(k.layer);
        return h;
    }
};

struct Builder {
    double a;   // cavity radius relative to the unit cell
    int n;      // surface grid cells per octant face
    int layers; // radial layers
    double grade;

    std::unordered_map<NodeKey, int, NodeKeyHash> ids;
    std::vector<Vec3> nodes;
    std::vector<NodeKey> keys;
    std::vector<std::array<int, 4>> tets;
    std::vector<std::array<int, 3>> cavity_tris;

    double layer_t(int k) const { return std::pow(double(k) / layers, grade); }

    /// Position from the key alone; signs applied after the magnitude so
    /// mirrored nodes are bitwise sign flips of each other.
    Vec3 position(const NodeKey &key) const {
        double ax = std::abs(key.sx) / (2.0 * n);
        double ay = std::abs(key.sy) / (2.0 * n);
        double az = std::abs(key.sz) / (2.0 * n);
        Vec3 s(ax, ay, az);
        Vec3 d = s / s.norm();
        double t = layer_t(key.layer);
        Vec3 p = (1.0 - t) * (a * d) + t * s;
        return {key.sx < 0 ? -p.x() : p.x(), key.sy < 0 ? -p.y() : p.y(),
                key.sz < 0 ? -p.z() : p.z()};
    }

    int node_id(const NodeKey &key) {
        auto it = ids.find(key);
        if (it != ids.end()) return it->second;
        int id = static_cast<int>(nodes.size());
        ids.emplace(key, id);
        nodes.push_back(position(key));
        keys.push_back(key);
        return id;
    }

    void build() {
        // corner bit b = di + 2 dj + 4 dk; six tets along the main diagonal,
        // one per axis permutation, oriented with the permutation's parity
        static const int tet_corners[6][4] = {{0, 1, 3, 7}, {0, 1, 5, 7}, {0, 2, 3, 7},
                                              {0, 2, 6, 7}, {0, 4, 5, 7}, {0, 4, 6, 7}};
        static const int tet_parity[6] = {1, -1, -1, 1, 1, -1};
        for (int ox : {1, -1})
            for (int oy : {1, -1})
                for (int oz : {1, -1}) {
                    int octant_parity = ox * oy * oz;
                    for (int f = 0; f < 3; ++f) {
                        // block axes: u, v are the in-face axes, chosen so the
                        // three interface diagonals match (u < v as axes)
                        int ua = f == 0 ? 1 : 0;
                        int va = f == 2 ? 1 : 2;
                        int block_parity = f == 1 ? -1 : 1; // (e_u, e_v, e_f) handedness
                        int expected = octant_parity * block_parity;
                        for (int i = 0; i < n; ++i)
                            for (int j = 0; j < n; ++j)
                                for (int k = 0; k < layers; ++k) {
                                    int corner[8];
                                    for (int b = 0; b < 8; ++b) {
                                        int di = b & 1, dj = (b >> 1) & 1, dk = (b >> 2) & 1;
                                        int s[3];
                                        s[f] = n;
                                        s[ua] = i + di;
                                        s[va] = j + dj;
                                        corner[b] = node_id(
                                            {ox * s[0], oy * s[1], oz * s[2], k + dk});
                                    }
                                    for (int tc_i = 0; tc_i < 6; ++tc_i) {
                                        const auto &tc = tet_corners[tc_i];
                                        std::array<int, 4> t = {corner[tc[0]], corner[tc[1]],
                                                                corner[tc[2]], corner[tc[3]]};
                                        if (expected * tet_parity[tc_i] < 0) std::swap(t[2], t[3]);
                                        double vol = tet_volume(nodes[t[0]], nodes[t[1]],
                                                                nodes[t[2]], nodes[t[3]]);
                                        if (!(vol > 0.0))
                                            throw GeometryFault(
                                                "mesh template produced a degenerate tet");
                                        tets.push_back(t);
                                    }
                                    if (k == 0) {
                                        // innermost faces (0,1,3) and (0,2,3) lie on the cavity
                                        cavity_tris.push_back({corner[0], corner[1], corner[3]});
                                        cavity_tris.push_back({corner[0], corner[2], corner[3]});
                                    }
                                }
                    }
                }
    }
};

inline SurfacePatch make_patch(const std::vector<Vec3> &nodes,
                               std::vector<std::array<int, 3>> tris, double radius) {
    SurfacePatch p;
    p.radius = radius;
    p.tris = std::move(tris);
    p.tri_areas.reserve(p.tris.size());
    std::vector<char> seen(nodes.size(), 0);
    for (auto &t : p.tris) {
        Vec3 c = (nodes[t[0]] + nodes[t[1]] + nodes[t[2]]) / 3.0;
        Vec3 nrm = (nodes[t[1]] - nodes[t[0]]).cross(nodes[t[2]] - nodes[t[0]]);
        if (nrm.dot(c) < 0.0) std::swap(t[1], t[2]); // outward w.r.t. cavity
        double area = 0.5 * (nodes[t[1]] - nodes[t[0]]).cross(nodes[t[2]] - nodes[t[0]]).norm();
        p.tri_areas.push_back(area);
        p.area_total += area;
        for (int v : t) seen[v] = 1;
    }
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (seen[i]) p.nodes.push_back(static_cast<int>(i));
    return p;
}

} // namespace meshdetail

/// Cell mesh with explicit template knobs; build_cell_mesh maps refine levels
/// onto them.
inline PeriodicMesh build_cell_mesh_custom(double a, int n, int layers, double grade = 1.4) {
    if (!(a > 0.0) || a >= 0.5) throw GeometryFault("build_cell_mesh: need 0 < a < 1/2");
    if (n < 1 || layers < 1) throw GeometryFault("build_cell_mesh: need n, layers >= 1");
    meshdetail::Builder b{a, n, layers, grade, {}, {}, {}, {}, {}};
    b.build();

    PeriodicMesh m;
    m.a = a;
    m.nodes = std::move(b.nodes);
    m.tets = std::move(b.tets);
    m.cavity = meshdetail::make_patch(m.nodes, std::move(b.cavity_tris), a);

    // Periodic pairing straight from the keys: slave face sx = -n pairs with
    // sx = +n. Recorded from the negative side, per axis.
    for (std::size_t id = 0; id < m.nodes.size(); ++id) {
        const auto &k = b.keys[id];
        if (k.layer != layers) continue;
        int s[3] = {k.sx, k.sy, k.sz};
        for (int axis = 0; axis < 3; ++axis) {
            if (s[axis] != -n) continue;
            meshdetail::NodeKey partner = k;
            (axis == 0 ? partner.sx : axis == 1 ? partner.sy : partner.sz) = n;
            auto it = b.ids.find(partner);
            if (it == b.ids.end()) throw GeometryFault("periodic partner missing");
            m.pairs.push_back({static_cast<int>(id), it->second, axis});
        }
    }
    return m;
}

inline int refine_to_n(int refine) { return 3 << (refine - 1); }

inline PeriodicMesh build_cell_mesh(double a, int refine) {
    if (refine < 1) throw GeometryFault("build_cell_mesh: refine >= 1");
    PeriodicMesh m = build_cell_mesh_custom(a, refine_to_n(refine), refine_to_n(refine));
    m.refine = refine;
    return m;
}

/// Box domain with a Dirichlet face: the unit-cell template scaled by 2L.
/// gamma_axis/gamma_sign select the clamped face (default bottom, z = -L).
inline DomainMesh build_domain_mesh(double half_width, double a, int refine, int gamma_axis = 2,
                                    int gamma_sign = -1) {
    if (!(half_width > 0.0) || !(a > 0.0) || a >= half_width)
        throw GeometryFault("build_domain_mesh: need 0 < a < L");
    if (refine < 1) throw GeometryFault("build_domain_mesh: refine >= 1");
    if (gamma_axis < 0 || gamma_axis > 2 || (gamma_sign != 1 && gamma_sign != -1))
        throw GeometryFault("build_domain_mesh: bad gamma face");
    int n = refine_to_n(refine);
    double a_rel = a / (2.0 * half_width);
    meshdetail::Builder b{a_rel, n, n, 1.4, {}, {}, {}, {}, {}};
    b.build();

    DomainMesh m;
    m.a = a;
    m.refine = refine;
    m.half_width = half_width;
    m.gamma_axis = gamma_axis;
    m.gamma_sign = gamma_sign;
    m.nodes = std::move(b.nodes);
    for (auto &p : m.nodes) p *= 2.0 * half_width;
    m.tets = std::move(b.tets);
    m.cavity = meshdetail::make_patch(m.nodes, std::move(b.cavity_tris), a);

    for (std::size_t id = 0; id < m.nodes.size(); ++id) {
        const auto &k = b.keys[id];
        if (k.layer != n) continue;
        int s[3] = {k.sx, k.sy, k.sz};
        if (s[gamma_axis] == gamma_sign * n) m.gamma_nodes.push_back(static_cast<int>(id));
    }
    if (m.gamma_nodes.empty()) throw GeometryFault("build_domain_mesh: empty Dirichlet face");
    return m;
}

// ---------------------------------------------------------------------------
// Quality report.
// ---------------------------------------------------------------------------

struct MeshQuality {
    double min_dihedral_deg = 180.0;
    double max_aspect = 0.0;       // longest edge over smallest altitude
    double volume_defect = 0.0;    // |sum V_tet - exact| / exact
    double cavity_area_defect = 0.0;
    double min_volume = 0.0;
};

inline MeshQuality mesh_quality(const MeshBase &m, double box_volume) {
    MeshQuality q;
    q.min_volume = std::numeric_limits<double>::max();
    double vol = 0.0;
    for (const auto &t : m.tets) {
        const Vec3 &p0 = m.nodes[t[0]], &p1 = m.nodes[t[1]], &p2 = m.nodes[t[2]],
                   &p3 = m.nodes[t[3]];
        double V = tet_volume(p0, p1, p2, p3);
        vol += V;
        q.min_volume = std::min(q.min_volume, V);

        const Vec3 *p[4] = {&p0, &p1, &p2, &p3};
        double max_edge = 0.0;
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) max_edge = std::max(max_edge, (*p[i] - *p[j]).norm());
        double max_face_area = 0.0;
        Vec3 face_n[4];
        for (int i = 0; i < 4; ++i) {
            // face opposite vertex i, outward
            int v[3];
            for (int j = 0, c = 0; j < 4; ++j)
                if (j != i) v[c++] = j;
            Vec3 nrm = (*p[v[1]] - *p[v[0]]).cross(*p[v[2]] - *p[v[0]]);
            if (nrm.dot(*p[i] - *p[v[0]]) > 0.0) nrm = -nrm;
            face_n[i] = nrm.normalized();
            max_face_area = std::max(max_face_area, 0.5 * nrm.norm());
        }
        q.max_aspect = std::max(q.max_aspect, max_edge * max_face_area / (3.0 * V));
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) {
                double c = -face_n[i].dot(face_n[j]);
                c = std::clamp(c, -1.0, 1.0);
                q.min_dihedral_deg = std::min(q.min_dihedral_deg, std::acos(c) * 180.0 / M_PI);
            }
    }
    double exact = box_volume - ball_volume(m.a);
    q.volume_defect = std::abs(vol - exact) / exact;
    q.cavity_area_defect = std::abs(m.cavity.area_total - sphere_area(m.a)) / sphere_area(m.a);
    return q;
}

inline MeshQuality mesh_quality(const PeriodicMesh &m) { return mesh_quality(m, 1.0); }
inline MeshQuality mesh_quality(const DomainMesh &m) {
    return mesh_quality(m, 8.0 * m.half_width * m.half_width * m.half_width);
}

// ---------------------------------------------------------------------------
// ASCII serialization. Coordinates are written with 17 significant digits so
// a round trip is bit exact.
// ---------------------------------------------------------------------------

inline void write_mesh(std::ostream &os, const PeriodicMesh &m) {
    char buf[96];
    os << "capmesh 1\n";
    os << "nodes " << m.nodes.size() << "\n";
    for (const auto &p : m.nodes) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", p.x(), p.y(), p.z());
        os << buf;
    }
    os << "tets " << m.tets.size() << "\n";
    for (const auto &t : m.tets) os << t[0] << ' ' << t[1] << ' ' << t[2] << ' ' << t[3] << "\n";
    os << "pairs " << m.pairs.size() << "\n";
    for (const auto &p : m.pairs) os << p[0] << ' ' << p[1] << ' ' << p[2] << "\n";
    os << "cavity " << m.cavity.tris.size() << "\n";
    for (const auto &t : m.cavity.tris) os << t[0] << ' ' << t[1] << ' ' << t[2] << "\n";
}

inline PeriodicMesh read_mesh(std::istream &is) {
    std::string tag;
    int version = 0;
    is >> tag >> version;
    if (tag != "capmesh" || version != 1) throw Error("read_mesh: not a capmesh 1 file");
    PeriodicMesh m;
    std::size_t count = 0;
    is >> tag >> count;
    if (tag != "nodes") throw Error("read_mesh: expected nodes section");
    m.nodes.resize(count);
    for (auto &p : m.nodes) is >> p.x() >> p.y() >> p.z();
    is >> tag >> count;
    if (tag != "tets") throw Error("read_mesh: expected tets section");
    m.tets.resize(count);
    for (auto &t : m.tets) is >> t[0] >> t[1] >> t[2] >> t[3];
    is >> tag >> count;
    if (tag != "pairs") throw Error("read_mesh: expected pairs section");
    m.pairs.resize(count);
    for (auto &p : m.pairs) is >> p[0] >> p[1] >> p[2];
    is >> tag >> count;
    if (tag != "cavity") throw Error("read_mesh: expected cavity section");
    std::vector<std::array<int, 3>> tris(count);
    for (auto &t : tris) is >> t[0] >> t[1] >> t[2];
    if (!is) throw Error("read_mesh: truncated file");
    double radius = 0.0;
    for (const auto &t : tris) radius = std::max(radius, m.nodes[t[0]].norm());
    m.a = radius;
    m.cavity = meshdetail::make_patch(m.nodes, std::move(tris), radius);
    return m;
}

/// Nodal vector field appended to the mesh sections as `field 3 N`.
inline void write_field(std::ostream &os, const PeriodicMesh &m, const Eigen::VectorXd &u) {
    write_mesh(os, m);
    char buf[96];
    os << "field 3 " << m.nodes.size() << "\n";
    for (std::size_t i = 0; i < m.nodes.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", u[3 * i], u[3 * i + 1], u[3 * i + 2]);
        os << buf;
    }
}

} // namespace caphom
