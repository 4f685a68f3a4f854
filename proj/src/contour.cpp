#include "rmt/contour.hpp"

#include <cmath>
#include <numbers>

#include "rmt/errors.hpp"
#include "rmt/quadrature.hpp"

namespace rmt {

using cplx = std::complex<double>;

ContourPiece ContourPiece::make_circle(cplx center, double radius, int nodes)
{
    ContourPiece p;
    p.kind = PieceKind::circle;
    p.center = center;
    p.radius = radius;
    p.nodes = nodes;
    return p;
}

ContourPiece ContourPiece::make_segment(cplx from, cplx to, int nodes)
{
    ContourPiece p;
    p.kind = PieceKind::segment;
    p.from = from;
    p.to = to;
    p.nodes = nodes;
    return p;
}

ContourPiece ContourPiece::make_arc(cplx center, double radius, double theta_from, double theta_to, int nodes)
{
    ContourPiece p;
    p.kind = PieceKind::arc;
    p.center = center;
    p.radius = radius;
    p.theta_from = theta_from;
    p.theta_to = theta_to;
    p.nodes = nodes;
    return p;
}

void ContourNodes::append(const ContourNodes& other)
{
    z.insert(z.end(), other.z.begin(), other.z.end());
    weight.insert(weight.end(), other.weight.begin(), other.weight.end());
}

ContourNodes discretize(const ContourSpec& spec)
{
    ContourNodes out;
    for (const ContourPiece& piece : spec.pieces) {
        const int n = piece.nodes > 0 ? piece.nodes : spec.nodes_per_piece;
        if (n < 16) {
            throw InvalidArgument("contour: at least 16 nodes per piece");
        }
        switch (piece.kind) {
        case PieceKind::circle: {
            if (!(piece.radius > 0.0)) {
                throw InvalidArgument("contour: circle radius must be positive");
            }
            for (int k = 0; k < n; ++k) {
                const double theta = 2.0 * std::numbers::pi * (k + 0.5) / n;
                const cplx e = std::polar(1.0, theta);
                out.z.push_back(piece.center + piece.radius * e);
                out.weight.push_back(cplx(0.0, 1.0) * piece.radius * e * (2.0 * std::numbers::pi / n));
            }
            break;
        }
        case PieceKind::segment: {
            const QuadratureRule rule = gauss_legendre(n, 0.0, 1.0);
            const cplx d = piece.to - piece.from;
            for (int k = 0; k < n; ++k) {
                out.z.push_back(piece.from + rule.nodes[k] * d);
                out.weight.push_back(rule.weights[k] * d);
            }
            break;
        }
        case PieceKind::arc: {
            if (!(piece.radius > 0.0)) {
                throw InvalidArgument("contour: arc radius must be positive");
            }
            const QuadratureRule rule = gauss_legendre(n, 0.0, 1.0);
            const double span = piece.theta_to - piece.theta_from;
            for (int k = 0; k < n; ++k) {
                const double theta = piece.theta_from + rule.nodes[k] * span;
                const cplx e = std::polar(1.0, theta);
                out.z.push_back(piece.center + piece.radius * e);
                out.weight.push_back(cplx(0.0, 1.0) * piece.radius * e * (rule.weights[k] * span));
            }
            break;
        }
        }
    }
    return out;
}

int winding_number(const std::vector<cplx>& polygon, cplx p)
{
    double total = 0.0;
    const std::size_t n = polygon.size();
    for (std::size_t i = 0; i < n; ++i) {
        const cplx a = polygon[i] - p;
        const cplx b = polygon[(i + 1) % n] - p;
        total += std::arg(b / a);
    }
    return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

}  // namespace rmt
