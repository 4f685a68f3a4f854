#pragma once

#include <complex>
#include <vector>

namespace rmt {

enum class PieceKind { circle, segment, arc };

// circle: full counterclockwise circle (periodic trapezoid nodes).
// segment: straight path from -> to (Gauss-Legendre nodes).
// arc: center + radius e^{i theta}, theta from theta_from to theta_to (Gauss-Legendre in theta).
struct ContourPiece {
    PieceKind kind = PieceKind::segment;
    std::complex<double> center{};
    double radius = 0.0;
    std::complex<double> from{};
    std::complex<double> to{};
    double theta_from = 0.0;
    double theta_to = 0.0;
    int nodes = 0;  // 0: use ContourSpec::nodes_per_piece

    static ContourPiece make_circle(std::complex<double> center, double radius, int nodes = 0);
    static ContourPiece make_segment(std::complex<double> from, std::complex<double> to, int nodes = 0);
    static ContourPiece make_arc(std::complex<double> center, double radius, double theta_from, double theta_to,
                                 int nodes = 0);
};

struct ContourSpec {
    std::vector<ContourPiece> pieces;
    int nodes_per_piece = 64;
};

// Quadrature nodes z_k with complex weights dz_k, so that sum_k weight_k h(z_k) ~ int h(z) dz.
struct ContourNodes {
    std::vector<std::complex<double>> z;
    std::vector<std::complex<double>> weight;

    void append(const ContourNodes& other);
    std::size_t size() const { return z.size(); }
};

ContourNodes discretize(const ContourSpec& spec);

// Winding number of a closed polygon (last vertex joined to the first) around p.
int winding_number(const std::vector<std::complex<double>>& polygon, std::complex<double> p);

}  // namespace rmt
