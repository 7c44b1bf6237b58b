#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace sme {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline double distance(Point a, Point b) {
    const double dx = a.x - b.x, dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

/// Continuum domain described by a signed distance (negative inside).
class Domain {
public:
    enum class Kind { Disk, Annulus, Rectangle, Convex };

    using SdfFn = std::function<double(double, double)>;

    static Domain disk(double cx, double cy, double radius);
    static Domain annulus(double cx, double cy, double r_inner, double r_outer);
    static Domain rectangle(double x0, double y0, double x1, double y1);
    /// General convex region. The bounding box must contain the region.
    static Domain convex(SdfFn sdf, double xmin, double ymin, double xmax, double ymax,
                         std::string name = "convex");

    Kind kind() const noexcept { return kind_; }
    double sdf(double x, double y) const;
    /// Closest point on the boundary.
    Point project(Point p) const;
    /// Outward unit normal at (or near) a boundary point.
    Point outward_normal(Point p) const;

    void bounding_box(double& xmin, double& ymin, double& xmax, double& ymax) const;
    /// Largest radius of a disk contained in the domain (approximate for Convex).
    double inradius() const;
    double diameter() const;
    Point center() const;

    /// Structured text descriptor, e.g. "disk cx=0 cy=0 r=1".
    std::string describe() const;
    /// Parse a descriptor of the form "disk:cx=0,cy=0,r=1" or the output of describe().
    static Domain parse(const std::string& spec);

    bool same_as(const Domain& other) const;

    // Raw parameters (meaning depends on kind).
    double cx = 0.0, cy = 0.0, r_inner = 0.0, r_outer = 1.0;
    double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;

private:
    Kind kind_ = Kind::Disk;
    SdfFn sdf_;
    std::string name_;
};

enum class NodeKind : unsigned char { Outside = 0, Interior = 1, Boundary = 2 };

/// Uniform lattice x = i h, y = j h covering a Domain. Interior nodes lie
/// strictly inside; boundary nodes are the outside lattice nodes in the
/// 3x3 neighbourhood of an interior node. Each boundary node carries the
/// closest continuum boundary point where Dirichlet data is evaluated.
class Grid2D {
public:
    Grid2D(Domain domain, double h);

    static std::shared_ptr<const Grid2D> make(Domain domain, double h) {
        return std::make_shared<const Grid2D>(std::move(domain), h);
    }

    double h() const noexcept { return h_; }
    const Domain& domain() const noexcept { return domain_; }

    int nx() const noexcept { return nx_; }
    int ny() const noexcept { return ny_; }
    int imin() const noexcept { return imin_; }
    int jmin() const noexcept { return jmin_; }
    std::size_t size() const noexcept { return kinds_.size(); }

    std::size_t index(int i, int j) const { return std::size_t(j - jmin_) * nx_ + std::size_t(i - imin_); }
    int i_of(std::size_t k) const { return int(k % nx_) + imin_; }
    int j_of(std::size_t k) const { return int(k / nx_) + jmin_; }
    Point coords(std::size_t k) const { return {i_of(k) * h_, j_of(k) * h_}; }
    bool in_lattice(int i, int j) const {
        return i >= imin_ && i < imin_ + nx_ && j >= jmin_ && j < jmin_ + ny_;
    }

    NodeKind kind(std::size_t k) const { return kinds_[k]; }
    bool active(std::size_t k) const { return kinds_[k] != NodeKind::Outside; }
    bool is_interior(std::size_t k) const { return kinds_[k] == NodeKind::Interior; }
    bool is_boundary(std::size_t k) const { return kinds_[k] == NodeKind::Boundary; }

    const std::vector<std::size_t>& interior() const noexcept { return interior_; }
    const std::vector<std::size_t>& boundary() const noexcept { return boundary_; }
    /// Position of a lattice node in interior() or -1.
    long interior_id(std::size_t k) const { return interior_id_[k]; }
    /// Position of a lattice node in boundary() or -1.
    long boundary_id(std::size_t k) const { return boundary_id_[k]; }
    /// Continuum boundary point attached to boundary()[b].
    Point boundary_anchor(std::size_t b) const { return anchors_[b]; }

    /// Lattice neighbour (i+di, j+dj); requires it to be in the lattice.
    std::size_t neighbor(std::size_t k, int di, int dj) const {
        return k + std::ptrdiff_t(dj) * nx_ + di;
    }

    /// Nearest lattice node to a point (any kind).
    std::size_t nearest_node(Point p) const;
    /// Nearest interior node to a point.
    std::size_t nearest_interior(Point p) const;

    /// Cells (lower-left lattice index) whose four corners are active and whose centre lies inside.
    const std::vector<std::size_t>& cells() const noexcept { return cells_; }

    /// Text block: domain descriptor plus h and node counts.
    std::string describe() const;

    bool same_as(const Grid2D& other) const;

private:
    Domain domain_;
    double h_;
    int imin_ = 0, jmin_ = 0, nx_ = 0, ny_ = 0;
    std::vector<NodeKind> kinds_;
    std::vector<std::size_t> interior_, boundary_, cells_;
    std::vector<long> interior_id_, boundary_id_;
    std::vector<Point> anchors_;
};

using GridPtr = std::shared_ptr<const Grid2D>;

}  // namespace sme
