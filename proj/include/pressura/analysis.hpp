#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pressura/environment.hpp"
#include "pressura/isa.hpp"
#include "pressura/population.hpp"

namespace pressura {

// Outcome of one isolated, mutation-free run on the test CPU.
struct FitnessResult {
  bool viable = false;
  double w = 0.0;  // merit / gestation; 0 when non-viable
  std::uint64_t gestation = 0;
  double merit = 0.0;
  bool child_identical = false;
};

struct NeutralitySpectrum {
  std::size_t total = 0;  // length * 25
  std::size_t n_deleterious = 0;
  std::size_t n_neutral = 0;
  std::size_t n_beneficial = 0;
  double nu = 0.0;  // (neutral + beneficial) / total
};

// The per-genotype quantities derived from (length, w0, nu, R).
struct GenotypeStats {
  std::size_t length = 0;
  double w0 = 0.0;
  double nu = 0.0;
  double fidelity = 0.0;          // (1-R)^length
  double neutral_fidelity = 0.0;  // (1-R+nu*R)^length
  double w_fidelity = 0.0;        // fidelity * w0
  double w_nu = 0.0;              // neutral_fidelity * w0
  double load_exact = 0.0;        // 1 - neutral_fidelity
  double load_approx = 0.0;       // 1 - exp(-R*length*(1-nu))
};

// Runs a genome alone at R = 0 against the canonical input stream until its
// first successful divide or step_cap steps (0 means 100 * length). Fitness
// uses length-scaled merit regardless of the experiment's scheduler so that
// genotypes are comparable across runs.
FitnessResult test_fitness(const Genome& genome, const TaskChecker& env,
                           std::uint64_t step_cap = 0);
FitnessResult test_fitness(const Genome& genome, const TaskTable& table,
                           std::uint64_t step_cap = 0);

// Every single-position substitution: length * 25 genomes, position-major,
// replacement-code-minor, never the original sequence.
std::vector<Genome> one_point_mutants(const Genome& genome);

// Exhaustive one-point-mutant classification against the wild-type fitness
// w0: neutral if |w' - w0| < w0/N, beneficial if w' >= w0*(1 + 1/N),
// otherwise deleterious; non-viable mutants are deleterious. Throws if the
// wild-type itself is non-viable.
NeutralitySpectrum classify_mutations(const Genome& genome, const TaskChecker& env,
                                      std::size_t population_size,
                                      std::uint64_t step_cap = 0);

// (1 - R + nu*R)^length
double neutral_fidelity(double rate, double nu, std::size_t length);

// f_nu * w
double effective_fitness(double w, double f_nu);

// {1 - (1-R+nu*R)^length, 1 - exp(-R*length*(1-nu))}
std::pair<double, double> mutational_load(double rate, std::size_t length, double nu);

// mean_fitness / w0 - f_nu; approaches 0 at mutation-selection balance.
double equilibrium_gap(double mean_fitness, double w0, double f_nu);

GenotypeStats make_genotype_stats(std::size_t length, double w0, double nu,
                                  double rate);

// Text report, one "key = value" per line.
std::string format_neutrality_report(const std::string& wild_type_name,
                                     const GenotypeStats& stats,
                                     const NeutralitySpectrum& spectrum,
                                     double rate, std::size_t population_size);

}  // namespace pressura
