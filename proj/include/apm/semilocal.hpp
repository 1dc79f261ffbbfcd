#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "apm/geometry.hpp"
#include "apm/globalmap.hpp"
#include "apm/parallel.hpp"

namespace apm {

enum class TangencyClass { Class1, Class2, H3_1, H3_2_1, H3_2_2, H3_3_1, H3_3_2, H3_4, H3_5, Unclassified };

std::string to_string(TangencyClass c);

// Sign data the class table is read from.
struct TangencyData {
    double lambda = 0.5;
    double gamma = 2.0;
    double b = -1.0, c = 1.0, d = 1.0;
    double x_plus = 1.0, y_minus = 1.0;
};

TangencyData tangency_data(const ModelMap& m);
// Coefficients of the inverse map (x and y interchanged).
TangencyData inverse_data(const TangencyData& t);
double tau_of(const TangencyData& t);

struct TangencyProfile {
    double tau = 0.0;
    double alpha = 0.0;
    double alpha_tilde = 2.0;
    double s0 = 0.0;      // with nu1 = sign(-bc)
    double s0_nor = 0.0;  // with nu1 = -1
    int nu1 = 1;
    TangencyClass class_tag = TangencyClass::Unclassified;
    // Representative the class table applies to; differs from the raw data when d had to be canonicalized.
    TangencyData canonical;
    double canonical_tau = 0.0;
    std::string canonicalization;  // "", "inverse", "shift"
};

TangencyClass classify_signs(const TangencyData& t);
TangencyProfile compute_profile(const ModelMap& m);

// |lambda|^k (y- + eps_y + |c|(x+ + eps_x)) / |d| <= min(eps_y, eps_x/|b|)^2 / 4, tau bound, and 4.
int default_k_bar(const ModelMap& m);

struct StripBoxes {
    Box sigma0;  // in Pi+
    Box sigma1;  // in Pi-
};

StripBoxes strip_geometry(const ModelMap& m, int k);

enum class Verdict { Regular, Empty, Borderline, Irregular };
std::string to_string(Verdict v);

struct StripPair {
    int i = 0, j = 0;
    Box strip_box;
    std::vector<Point> horseshoe_samples;
    Verdict verdict = Verdict::Borderline;
    double lemma_margin = 0.0;  // d (gamma^-i y- - c lambda^j x+)
    double threshold = 0.0;     // S1 (|lambda|^i + |lambda|^j) |lambda|^(k_bar/2)
};

double lemma_margin(const ModelMap& m, int i, int j);
StripPair intersection_classify(const ModelMap& m, int i, int j, double S1, int k_bar);

struct GeometricResult {
    Verdict verdict = Verdict::Empty;  // Regular, Empty or Irregular
    int components = 0;
    bool stable = true;                // false when the count did not settle under refinement
    double min_expansion = 0.0;
};

// Counts connected components of T1(sigma_j^1) inside sigma_i^0 on a sampled grid and checks expansion.
GeometricResult geometric_intersection(const ModelMap& m, int i, int j);

struct Calibration {
    double S1 = 0.0;
    int disagreements = 0;  // pairs in the window where the S1 = 0 verdict differs from the oracle
};

// Smallest S1 removing every disagreement between the lemma verdict and the oracle on [k_bar, k_bar + window].
Calibration calibrate_S1(const ModelMap& m, int k_bar, int window = 8, Exec exec = Exec::Parallel);

struct SymbolCode {
    std::vector<int> blocks;
    std::vector<int> markers;  // 1 or 2 per block; empty means unspecified
    bool periodic = true;
};

SymbolCode parse_code(const std::string& text);

// Whether the block transition j -> i carries an orbit for the canonical class.
bool admissible_transition(const TangencyProfile& p, int j, int i);
bool admissible_code(const TangencyProfile& p, const SymbolCode& code, int k_bar);

enum class OrbitStatus { Found, Absent, Inconclusive };
std::string to_string(OrbitStatus s);

struct CodeOrbit {
    OrbitStatus status = OrbitStatus::Absent;
    std::vector<int> markers;
    std::vector<Point> points;  // one point of Pi+ per block
    double residual = 0.0;
    std::string certificate;  // reason for Absent or Inconclusive
};

// Multi-shooting Newton for a periodic code with given markers.
CodeOrbit code_to_orbit(const ModelMap& m, const SymbolCode& code);

struct CodeReport {
    SymbolCode code;
    bool admissible = false;
    std::vector<CodeOrbit> orbits;  // one entry per marker sequence
    int found = 0;
    int inconclusive = 0;
};

// Every marker sequence of the blocks; markers in the input are ignored.
CodeReport verify_code(const ModelMap& m, const TangencyProfile& p, const SymbolCode& code, int k_bar);

// All periodic codes of 1 and 2 blocks in [lo, hi] (cyclic rotations removed).
std::vector<SymbolCode> small_codes(int lo, int hi);

}  // namespace apm
