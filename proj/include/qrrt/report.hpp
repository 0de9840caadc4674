#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "qrrt/series.hpp"

namespace qrrt {

/// Truncation bounds a computation is carried out at.
struct Orders {
    int q_order = 100;
    std::optional<int> a_order;
};

enum class Status { Pass, Fail, Ambiguous };

inline const char* to_string(Status s) {
    switch (s) {
        case Status::Pass: return "pass";
        case Status::Fail: return "fail";
        case Status::Ambiguous: return "ambiguous";
    }
    return "?";
}

struct FirstDivergence {
    std::string location;  // e.g. "n=3" or the relation that failed
    int a_exp = 0;
    int q_exp = 0;
    Int lhs_coeff;
    Int rhs_coeff;
};

/// Outcome of one verification target.  A fail status always carries the
/// first divergence; a pass certifies equality up to the stated orders.
struct VerificationReport {
    std::string target;
    Status status = Status::Pass;
    int checked_q_order = 0;
    std::optional<int> checked_a_order;
    std::optional<FirstDivergence> first_divergence;
    long elapsed_ms = 0;

    bool passed() const { return status == Status::Pass; }

    void record_divergence(const std::string& location, const Divergence& d) {
        if (status == Status::Fail) return;  // keep the first one
        status = Status::Fail;
        first_divergence = FirstDivergence{location, d.a_exp, d.q_exp, d.lhs, d.rhs};
    }

    std::string summary() const {
        std::string s = target + ": " + to_string(status) + " (q_order " +
                        std::to_string(checked_q_order);
        if (checked_a_order) s += ", a_order " + std::to_string(*checked_a_order);
        s += ", " + std::to_string(elapsed_ms) + " ms)";
        if (first_divergence) {
            s += " first divergence at " + first_divergence->location + " a^" +
                 std::to_string(first_divergence->a_exp) + " q^" +
                 std::to_string(first_divergence->q_exp) + ": " +
                 first_divergence->lhs_coeff.get_str() + " vs " +
                 first_divergence->rhs_coeff.get_str();
        }
        return s;
    }
};

/// Wall-clock helper for filling elapsed_ms.
class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    long elapsed_ms() const {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now() - start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

}  // namespace qrrt
