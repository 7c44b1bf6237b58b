#include "smelab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "smelab/errors.hpp"

namespace sme {

namespace {

std::string fmt_num(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

double ellipse_sdf(double x, double y, double cx, double cy, double a, double b) {
    const double q = std::sqrt(((x - cx) / a) * ((x - cx) / a) + ((y - cy) / b) * ((y - cy) / b));
    return (q - 1.0) * std::min(a, b);
}

}  // namespace

Domain Domain::disk(double cx, double cy, double radius) {
    if (!(radius > 0)) throw PreconditionError("disk radius must be positive");
    Domain d;
    d.kind_ = Kind::Disk;
    d.cx = cx;
    d.cy = cy;
    d.r_outer = radius;
    d.r_inner = 0.0;
    return d;
}

Domain Domain::annulus(double cx, double cy, double r_inner, double r_outer) {
    if (!(r_inner > 0 && r_outer > r_inner)) throw PreconditionError("annulus needs 0 < r_inner < r_outer");
    Domain d;
    d.kind_ = Kind::Annulus;
    d.cx = cx;
    d.cy = cy;
    d.r_inner = r_inner;
    d.r_outer = r_outer;
    return d;
}

Domain Domain::rectangle(double x0, double y0, double x1, double y1) {
    if (!(x1 > x0 && y1 > y0)) throw PreconditionError("rectangle needs x1 > x0 and y1 > y0");
    Domain d;
    d.kind_ = Kind::Rectangle;
    d.x0 = x0;
    d.y0 = y0;
    d.x1 = x1;
    d.y1 = y1;
    return d;
}

Domain Domain::convex(SdfFn sdf, double xmin, double ymin, double xmax, double ymax, std::string name) {
    if (!sdf) throw PreconditionError("convex domain needs a signed-distance callback");
    Domain d;
    d.kind_ = Kind::Convex;
    d.sdf_ = std::move(sdf);
    d.x0 = xmin;
    d.y0 = ymin;
    d.x1 = xmax;
    d.y1 = ymax;
    d.name_ = std::move(name);
    return d;
}

double Domain::sdf(double x, double y) const {
    switch (kind_) {
        case Kind::Disk:
            return std::hypot(x - cx, y - cy) - r_outer;
        case Kind::Annulus: {
            const double r = std::hypot(x - cx, y - cy);
            return std::max(r - r_outer, r_inner - r);
        }
        case Kind::Rectangle: {
            const double dx = std::max(x0 - x, x - x1);
            const double dy = std::max(y0 - y, y - y1);
            if (dx <= 0 && dy <= 0) return std::max(dx, dy);
            const double ox = std::max(dx, 0.0), oy = std::max(dy, 0.0);
            return std::hypot(ox, oy);
        }
        case Kind::Convex:
            return sdf_(x, y);
    }
    return 0.0;
}

Point Domain::project(Point p) const {
    switch (kind_) {
        case Kind::Disk:
        case Kind::Annulus: {
            const double dx = p.x - cx, dy = p.y - cy;
            const double r = std::hypot(dx, dy);
            double target = r_outer;
            if (kind_ == Kind::Annulus && std::abs(r - r_inner) < std::abs(r - r_outer)) target = r_inner;
            if (r == 0.0) return {cx + target, cy};
            return {cx + dx * target / r, cy + dy * target / r};
        }
        case Kind::Rectangle: {
            const bool inside = p.x > x0 && p.x < x1 && p.y > y0 && p.y < y1;
            if (!inside) return {std::clamp(p.x, x0, x1), std::clamp(p.y, y0, y1)};
            const double dl = p.x - x0, dr = x1 - p.x, db = p.y - y0, dt = y1 - p.y;
            const double m = std::min({dl, dr, db, dt});
            if (m == dl) return {x0, p.y};
            if (m == dr) return {x1, p.y};
            if (m == db) return {p.x, y0};
            return {p.x, y1};
        }
        case Kind::Convex: {
            Point q = p;
            const double eps = 1e-7 * std::max(x1 - x0, y1 - y0);
            for (int it = 0; it < 50; ++it) {
                const double s = sdf_(q.x, q.y);
                if (std::abs(s) < 1e-14) break;
                const double gx = (sdf_(q.x + eps, q.y) - sdf_(q.x - eps, q.y)) / (2 * eps);
                const double gy = (sdf_(q.x, q.y + eps) - sdf_(q.x, q.y - eps)) / (2 * eps);
                const double g2 = gx * gx + gy * gy;
                if (g2 == 0.0) break;
                q.x -= s * gx / g2;
                q.y -= s * gy / g2;
            }
            return q;
        }
    }
    return p;
}

Point Domain::outward_normal(Point p) const {
    const double eps = 1e-7 * std::max(1.0, diameter());
    const double gx = (sdf(p.x + eps, p.y) - sdf(p.x - eps, p.y)) / (2 * eps);
    const double gy = (sdf(p.x, p.y + eps) - sdf(p.x, p.y - eps)) / (2 * eps);
    const double g = std::hypot(gx, gy);
    if (g == 0.0) return {1.0, 0.0};
    return {gx / g, gy / g};
}

void Domain::bounding_box(double& xmin, double& ymin, double& xmax, double& ymax) const {
    switch (kind_) {
        case Kind::Disk:
        case Kind::Annulus:
            xmin = cx - r_outer;
            xmax = cx + r_outer;
            ymin = cy - r_outer;
            ymax = cy + r_outer;
            return;
        case Kind::Rectangle:
        case Kind::Convex:
            xmin = x0;
            xmax = x1;
            ymin = y0;
            ymax = y1;
            return;
    }
}

double Domain::inradius() const {
    switch (kind_) {
        case Kind::Disk:
            return r_outer;
        case Kind::Annulus:
            return 0.5 * (r_outer - r_inner);
        case Kind::Rectangle:
            return 0.5 * std::min(x1 - x0, y1 - y0);
        case Kind::Convex: {
            double best = 0.0;
            const int N = 200;
            for (int j = 0; j <= N; ++j)
                for (int i = 0; i <= N; ++i) {
                    const double x = x0 + (x1 - x0) * i / N, y = y0 + (y1 - y0) * j / N;
                    best = std::max(best, -sdf_(x, y));
                }
            return best;
        }
    }
    return 0.0;
}

double Domain::diameter() const {
    switch (kind_) {
        case Kind::Disk:
        case Kind::Annulus:
            return 2.0 * r_outer;
        case Kind::Rectangle:
        case Kind::Convex:
            return std::hypot(x1 - x0, y1 - y0);
    }
    return 0.0;
}

Point Domain::center() const {
    switch (kind_) {
        case Kind::Disk:
        case Kind::Annulus:
            return {cx, cy};
        case Kind::Rectangle:
            return {0.5 * (x0 + x1), 0.5 * (y0 + y1)};
        case Kind::Convex: {
            Point best{0.5 * (x0 + x1), 0.5 * (y0 + y1)};
            double bv = sdf_(best.x, best.y);
            const int N = 200;
            for (int j = 0; j <= N; ++j)
                for (int i = 0; i <= N; ++i) {
                    const double x = x0 + (x1 - x0) * i / N, y = y0 + (y1 - y0) * j / N;
                    const double v = sdf_(x, y);
                    if (v < bv) {
                        bv = v;
                        best = {x, y};
                    }
                }
            return best;
        }
    }
    return {};
}

std::string Domain::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::Disk:
            os << "disk cx=" << fmt_num(cx) << " cy=" << fmt_num(cy) << " r=" << fmt_num(r_outer);
            break;
        case Kind::Annulus:
            os << "annulus cx=" << fmt_num(cx) << " cy=" << fmt_num(cy) << " r_in=" << fmt_num(r_inner)
               << " r_out=" << fmt_num(r_outer);
            break;
        case Kind::Rectangle:
            os << "rect x0=" << fmt_num(x0) << " y0=" << fmt_num(y0) << " x1=" << fmt_num(x1)
               << " y1=" << fmt_num(y1);
            break;
        case Kind::Convex:
            os << name_;
            break;
    }
    return os.str();
}

Domain Domain::parse(const std::string& spec) {
    std::string s = spec;
    for (char& c : s)
        if (c == ':' || c == ',') c = ' ';
    std::istringstream is(s);
    std::string kind;
    is >> kind;
    std::map<std::string, double> kv;
    std::string tok;
    while (is >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) throw ParseError("domain spec: expected key=value, got '" + tok + "'");
        const std::string key = tok.substr(0, eq);
        const std::string val = tok.substr(eq + 1);
        try {
            std::size_t used = 0;
            kv[key] = std::stod(val, &used);
            if (used != val.size()) throw std::invalid_argument(val);
        } catch (const std::exception&) {
            throw ParseError("domain spec: bad number for '" + key + "': '" + val + "'");
        }
    }
    auto get = [&](const std::string& key, double def, bool required) {
        auto it = kv.find(key);
        if (it == kv.end()) {
            if (required) throw ParseError("domain spec '" + spec + "': missing '" + key + "'");
            return def;
        }
        return it->second;
    };
    try {
        if (kind == "disk") return disk(get("cx", 0, false), get("cy", 0, false), get("r", 1, false));
        if (kind == "annulus")
            return annulus(get("cx", 0, false), get("cy", 0, false), get("r_in", 0, true), get("r_out", 1, false));
        if (kind == "rect" || kind == "rectangle")
            return rectangle(get("x0", 0, true), get("y0", 0, true), get("x1", 1, true), get("y1", 1, true));
        if (kind == "ellipse") {
            const double ex = get("cx", 0, false), ey = get("cy", 0, false);
            const double a = get("a", 1, true), b = get("b", 1, true);
            if (!(a > 0 && b > 0)) throw ParseError("ellipse semi-axes must be positive");
            std::ostringstream name;
            name << "ellipse cx=" << fmt_num(ex) << " cy=" << fmt_num(ey) << " a=" << fmt_num(a) << " b=" << fmt_num(b);
            return convex([=](double x, double y) { return ellipse_sdf(x, y, ex, ey, a, b); }, ex - a, ey - b, ex + a,
                          ey + b, name.str());
        }
    } catch (const PreconditionError& e) {
        throw ParseError(std::string("domain spec: ") + e.what());
    }
    throw ParseError("domain spec: unknown kind '" + kind + "' (expected disk, annulus, rect, ellipse)");
}

bool Domain::same_as(const Domain& o) const {
    return kind_ == o.kind_ && describe() == o.describe();
}

Grid2D::Grid2D(Domain domain, double h) : domain_(std::move(domain)), h_(h) {
    if (!(h > 0)) throw PreconditionError("grid spacing h must be positive");
    double xmin, ymin, xmax, ymax;
    domain_.bounding_box(xmin, ymin, xmax, ymax);
    imin_ = int(std::floor(xmin / h)) - 2;
    jmin_ = int(std::floor(ymin / h)) - 2;
    const int imax = int(std::ceil(xmax / h)) + 2;
    const int jmax = int(std::ceil(ymax / h)) + 2;
    nx_ = imax - imin_ + 1;
    ny_ = jmax - jmin_ + 1;

    const std::size_t N = std::size_t(nx_) * ny_;
    kinds_.assign(N, NodeKind::Outside);
    const double eps = 1e-9 * h;
    for (std::size_t k = 0; k < N; ++k) {
        const Point p = coords(k);
        if (domain_.sdf(p.x, p.y) < -eps) kinds_[k] = NodeKind::Interior;
    }
    for (int j = jmin_ + 1; j < jmin_ + ny_ - 1; ++j)
        for (int i = imin_ + 1; i < imin_ + nx_ - 1; ++i) {
            const std::size_t k = index(i, j);
            if (kinds_[k] != NodeKind::Outside) continue;
            bool near = false;
            for (int dj = -1; dj <= 1 && !near; ++dj)
                for (int di = -1; di <= 1 && !near; ++di)
                    if (kinds_[index(i + di, j + dj)] == NodeKind::Interior) near = true;
            if (near) kinds_[k] = NodeKind::Boundary;
        }

    interior_id_.assign(N, -1);
    boundary_id_.assign(N, -1);
    for (std::size_t k = 0; k < N; ++k) {
        if (kinds_[k] == NodeKind::Interior) {
            interior_id_[k] = long(interior_.size());
            interior_.push_back(k);
        } else if (kinds_[k] == NodeKind::Boundary) {
            boundary_id_[k] = long(boundary_.size());
            boundary_.push_back(k);
            anchors_.push_back(domain_.project(coords(k)));
        }
    }
    if (interior_.empty()) throw StructuralError("grid has no interior nodes; h too coarse for the domain");

    for (int j = jmin_; j < jmin_ + ny_ - 1; ++j)
        for (int i = imin_; i < imin_ + nx_ - 1; ++i) {
            const std::size_t k = index(i, j);
            if (!active(k) || !active(index(i + 1, j)) || !active(index(i, j + 1)) || !active(index(i + 1, j + 1)))
                continue;
            if (domain_.sdf((i + 0.5) * h, (j + 0.5) * h) < 0) cells_.push_back(k);
        }
}

std::size_t Grid2D::nearest_node(Point p) const {
    const int i = std::clamp(int(std::lround(p.x / h_)), imin_, imin_ + nx_ - 1);
    const int j = std::clamp(int(std::lround(p.y / h_)), jmin_, jmin_ + ny_ - 1);
    return index(i, j);
}

std::size_t Grid2D::nearest_interior(Point p) const {
    const std::size_t k0 = nearest_node(p);
    if (is_interior(k0)) return k0;
    std::size_t best = interior_.front();
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t k : interior_) {
        const double d = distance(coords(k), p);
        if (d < bd) {
            bd = d;
            best = k;
        }
    }
    return best;
}

std::string Grid2D::describe() const {
    std::ostringstream os;
    os << "domain: " << domain_.describe() << "\n";
    os << "h: " << fmt_num(h_) << "\n";
    os << "lattice: imin=" << imin_ << " jmin=" << jmin_ << " nx=" << nx_ << " ny=" << ny_ << "\n";
    os << "interior: " << interior_.size() << "\n";
    os << "boundary: " << boundary_.size() << "\n";
    return os.str();
}

bool Grid2D::same_as(const Grid2D& o) const {
    return this == &o || (h_ == o.h_ && imin_ == o.imin_ && jmin_ == o.jmin_ && nx_ == o.nx_ && ny_ == o.ny_ &&
                          domain_.same_as(o.domain_));
}

}  // namespace sme
