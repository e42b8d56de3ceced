#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qtk {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

inline constexpr double kPi = 3.14159265358979323846;

// Thrown for malformed inputs that violate an operation's precondition.
struct QtkError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Valid inputs for which a probabilistic run still failed.
struct ExecutionError : QtkError {
    using QtkError::QtkError;
};

// Seeded 64-bit stream. Uniform and normal draws are derived from raw
// engine output so results do not depend on the standard library's
// distribution implementations.
class Rng {
   public:
    explicit Rng(uint64_t seed = 0);

    uint64_t next_u64();
    double uniform();                 // [0, 1)
    double normal(double sigma = 1);  // mean 0
    uint64_t below(uint64_t n);       // uniform integer in [0, n)
    Rng split();

   private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0;
};

// Basis index <-> bit string, qubit 0 leftmost.
std::string index_to_bits(uint64_t index, int n_bits);
uint64_t bits_to_index(const std::string &bits);

// Reverses a bit string, converting between our clbit-0-leftmost strings
// and Qiskit's c[0]-rightmost display.
std::string qiskit_order(const std::string &bits);

}  // namespace qtk
