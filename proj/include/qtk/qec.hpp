#pragma once

#include <map>
#include <string>

#include "qtk/circuit.hpp"

namespace qtk {

int majority_decode(const std::string &bits);

struct QecNoise {
    NoiseModel gate_noise;        // per-gate over-rotation and bit flips
    double readout_flip_p = 0;    // independent flip of each measured bit
    double correlated_sigma = 0;  // common e^{-i d X} on every data qubit, d ~ N(0, sigma)

    void validate() const;
};

struct QecReport {
    double p_unencoded = 0;
    double p_encoded = 0;  // P110 + P101 + P011 + P111
    std::map<std::string, double> outcome_breakdown;
    int shots = 0;
};

// |+>, idle_gates T gates, back to |0>, measure. Returns the rate of reading 1.
double run_single_qubit_test(int idle_gates, const QecNoise &noise, int shots, Rng &rng);
// GHZ encoding, idle_gates T gates spread round-robin over the three qubits,
// decoding, majority vote. Also runs the unencoded test for comparison.
QecReport run_ghz_test(int idle_gates, const QecNoise &noise, int shots, Rng &rng);

}  // namespace qtk
