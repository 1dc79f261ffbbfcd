#pragma once

#include <string>
#include <vector>

#include "apm/globalmap.hpp"
#include "apm/parallel.hpp"

namespace apm {

// e_k: fixed points, e_k2: 2-cycles; the tilde kinds are the lambda*gamma = -1 even/odd cases.
enum class CascadeKind { Ek, Ek2, TildeEven, Tilde2Odd };
std::string to_string(CascadeKind k);

CascadeKind cascade_kind(const ModelMap& m, int k);
inline bool uses_two_cycles(CascadeKind k) { return k == CascadeKind::Ek2 || k == CascadeKind::Tilde2Odd; }

// Limit-map values: endpoints (M at trace +2 / -2 of the relevant orbit) and resonances.
struct CascadeTargets {
    double M_plus = 0.0, M_minus = 0.0;
    std::vector<std::string> resonance_tags;
    std::vector<double> resonance_traces;
    std::vector<double> resonance_M;
};
CascadeTargets cascade_targets(CascadeKind kind);

struct ResonanceMu {
    std::string tag;
    double M = 0.0;
    double mu_formula = 0.0;
    double mu_detected = 0.0;
};

struct CascadeInterval {
    int k = 0;
    CascadeKind kind = CascadeKind::Ek;
    double mu_plus_detected = 0.0, mu_minus_detected = 0.0;
    double mu_plus_formula = 0.0, mu_minus_formula = 0.0;
    std::vector<ResonanceMu> resonances;
    bool complete = true;  // false when the branch was lost
    std::string message;

    double lo() const;
    double hi() const;
};

// Continues the elliptic branch of T_k (or T_k^2) and root-finds the trace targets, one k per work item.
std::vector<CascadeInterval> cascade_scan(const ModelMap& m, int k_min, int k_max, Exec exec = Exec::Parallel);
CascadeInterval cascade_interval(const ModelMap& m, int k);

enum class CurveTag { BkPlus, BkMinus, BkPM1, Bk2Minus, TildePlus, TildeMinus, TildePM1, Tilde2Minus };
std::string to_string(CurveTag t);

struct BifCurveSample {
    int k = 0;
    CurveTag tag = CurveTag::BkPlus;
    double alpha = 0.0;
    double alpha_tilde = 2.0;
    double mu = 0.0;
};

// mu on the curve with limit value M at the given alpha, corrections dropped; s0 and beta1 come from the model.
double curve_mu(const ModelMap& m, int k, double M, double alpha);
std::vector<BifCurveSample> bif_curves(const ModelMap& m, int k_min, int k_max, const std::vector<double>& alphas);

struct ResonanceEntry {
    int k = 0;
    CascadeKind kind = CascadeKind::Ek;
    double M = 0.0;             // limit parameter at mu = 0
    bool expected = false;      // elliptic orbit predicted by the limit map
    bool found = false;
    double trace = 0.0;
    double limit_trace = 0.0;
};

struct ResonanceReport {
    std::vector<ResonanceEntry> entries;
    bool generic = true;  // s0 away from the strong resonances
    bool ok = true;       // found == expected for every k
    std::vector<std::string> failures;
};

// Requires mu = 0 and alpha (or alpha + 2 for odd-k non-orientable blocks) below 1e-10.
ResonanceReport global_resonance_check(const ModelMap& m, int k_min, int k_max, Exec exec = Exec::Parallel);

// Changes of the homoclinic pair: M+ -> T0(M+) (Plus), M- -> T0^-1(M-) (Minus), twice each, or one of each
// with the reflection x -> -x in between (Mixed).
enum class PairShift { Plus, Minus, PlusTwice, MinusTwice, Mixed };
std::string to_string(PairShift v);

GlobalMapCoeffs shift_pair(const GlobalMapCoeffs& c, double lambda, double gamma, double beta1, PairShift v);

struct PairInvariance {
    double s0 = 0.0;
    double s0_shifted = 0.0;
    double predicted = 0.0;  // value the coefficient algebra predicts for s0_shifted
};

PairInvariance s0_pair_invariance(const GlobalMapCoeffs& c, const SaddleNormalForm& s, PairShift v, int nu1);

}  // namespace apm
