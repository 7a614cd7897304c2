#pragma once
// Independent re-statements of the scoring rules, kept deliberately apart
// from the library implementations they check. Everything here is a direct
// transcription of the defining formula, computed the long way.
#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace oracle {

// Q = sum_d w_d * q_d with w = (0.4, 0.3, 0.2, 0.1).
inline double quality(double rel, double auth, double fresh, double comp) {
    const double weights[4] = {0.4, 0.3, 0.2, 0.1};
    const double dims[4] = {rel, auth, fresh, comp};
    double sum = 0.0;
    for (int d = 0; d < 4; ++d) sum += weights[d] * dims[d];
    return sum;
}

// rho = lambda * lex + (1 - lambda) * sem.
inline double subject(double lex, double sem, double lambda) {
    return lambda * lex + (1.0 - lambda) * sem;
}

// conf(f) = |confirming| / |addressing|; undefined 0/0 keeps sigma.
inline double confidence(int confirming, int addressing, double sigma) {
    if (addressing == 0) return sigma;
    return static_cast<double>(confirming) / static_cast<double>(addressing);
}

// Accept iff conf >= 0.8, Verify iff 0.5 <= conf < 0.8, else Reject.
enum class Verdict { Accept, Verify, Reject };
inline Verdict validation(double conf) {
    if (conf >= 0.8) return Verdict::Accept;
    if (conf >= 0.5) return Verdict::Verify;
    return Verdict::Reject;
}

// conf(f') = r * min_j conf(f_j).
inline double propagation(double r, const std::vector<double>& basis) {
    if (basis.empty()) throw std::invalid_argument("propagation needs a basis");
    double lowest = basis[0];
    for (double b : basis) lowest = std::min(lowest, b);
    return r * lowest;
}

// Cov = (1/|R|) * sum_i [1_C(r_i) + 0.5 * 1_P(r_i)].
enum class Status { Covered, Partial, Missing };
inline double cov_score(const std::vector<Status>& statuses) {
    if (statuses.empty()) throw std::invalid_argument("cov_score needs requirements");
    double acc = 0.0;
    for (auto s : statuses) {
        if (s == Status::Covered) acc += 1.0;
        else if (s == Status::Partial) acc += 0.5;
    }
    return acc / static_cast<double>(statuses.size());
}

// alpha*C + beta*A + gamma*T.
inline double objective(double c, double a, double t, double alpha, double beta, double gamma) {
    return alpha * c + beta * a + gamma * t;
}

}  // namespace oracle
