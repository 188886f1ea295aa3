#include "pressura/analysis.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace pressura {

namespace {

void check_formula_args(double rate, double nu, std::size_t length) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw std::invalid_argument("rate must lie in [0, 1]");
  if (!(nu >= 0.0 && nu <= 1.0)) throw std::invalid_argument("nu must lie in [0, 1]");
  if (length < 1) throw std::invalid_argument("length must be positive");
}

std::string g6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

FitnessResult test_fitness(const Genome& genome, const TaskChecker& env,
                           std::uint64_t step_cap) {
  FitnessResult result;
  if (genome.empty()) return result;
  if (step_cap == 0) step_cap = 100 * genome.length();

  CpuState cpu(genome);
  const MutationConfig mut{};  // mutation-free
  Rng rng(0);                  // never consumed at zero rates
  for (std::uint64_t s = 0; s < step_cap; ++s) {
    StepEffect effect = cpu.step(env, mut, rng);
    if (effect.divide) {
      const DivideOutcome& d = *effect.divide;
      result.viable = true;
      result.gestation = d.parent_gestation;
      result.child_identical = d.child == genome;
      result.merit = merit_of(d.child.length(), d.parent_tasks, env.table(),
                              SchedulerMode::kMeritScaled);
      result.w = result.merit / static_cast<double>(d.parent_gestation);
      return result;
    }
  }
  return result;
}

FitnessResult test_fitness(const Genome& genome, const TaskTable& table,
                           std::uint64_t step_cap) {
  return test_fitness(genome, TaskChecker(table), step_cap);
}

std::vector<Genome> one_point_mutants(const Genome& genome) {
  std::vector<Genome> mutants;
  mutants.reserve(genome.length() * (kAlphabetSize - 1));
  std::vector<Instruction> code = genome.code();
  for (std::size_t pos = 0; pos < code.size(); ++pos) {
    const Instruction original = code[pos];
    for (std::uint8_t c = 0; c < kAlphabetSize; ++c) {
      const Instruction replacement = instruction_from_code(c);
      if (replacement == original) continue;
      code[pos] = replacement;
      mutants.emplace_back(code);
    }
    code[pos] = original;
  }
  return mutants;
}

NeutralitySpectrum classify_mutations(const Genome& genome, const TaskChecker& env,
                                      std::size_t population_size,
                                      std::uint64_t step_cap) {
  if (population_size < 1) throw std::invalid_argument("population size must be positive");
  const FitnessResult wild = test_fitness(genome, env, step_cap);
  if (!wild.viable || !(wild.w > 0.0)) {
    throw std::invalid_argument("wild-type is non-viable; neutrality undefined");
  }
  const double w0 = wild.w;
  const double band = w0 / static_cast<double>(population_size);

  NeutralitySpectrum spectrum;
  spectrum.total = genome.length() * (kAlphabetSize - 1);
  std::vector<Instruction> code = genome.code();
  for (std::size_t pos = 0; pos < code.size(); ++pos) {
    const Instruction original = code[pos];
    for (std::uint8_t c = 0; c < kAlphabetSize; ++c) {
      const Instruction replacement = instruction_from_code(c);
      if (replacement == original) continue;
      code[pos] = replacement;
      const FitnessResult fr = test_fitness(Genome(code), env, step_cap);
      if (!fr.viable) {
        ++spectrum.n_deleterious;
      } else if (std::abs(fr.w - w0) < band) {
        ++spectrum.n_neutral;
      } else if (fr.w >= w0 + band) {
        ++spectrum.n_beneficial;
      } else {
        ++spectrum.n_deleterious;
      }
    }
    code[pos] = original;
  }
  spectrum.nu = static_cast<double>(spectrum.n_neutral + spectrum.n_beneficial) /
                static_cast<double>(spectrum.total);
  return spectrum;
}

double neutral_fidelity(double rate, double nu, std::size_t length) {
  check_formula_args(rate, nu, length);
  return std::pow(1.0 - rate + nu * rate, static_cast<double>(length));
}

double effective_fitness(double w, double f_nu) {
  if (!(w >= 0.0)) throw std::invalid_argument("fitness must be nonnegative");
  return f_nu * w;
}

std::pair<double, double> mutational_load(double rate, std::size_t length, double nu) {
  check_formula_args(rate, nu, length);
  const double exact = 1.0 - std::pow(1.0 - rate + nu * rate, static_cast<double>(length));
  const double approx =
      1.0 - std::exp(-rate * static_cast<double>(length) * (1.0 - nu));
  return {exact, approx};
}

double equilibrium_gap(double mean_fitness, double w0, double f_nu) {
  if (!(w0 > 0.0)) throw std::invalid_argument("w0 must be positive");
  return mean_fitness / w0 - f_nu;
}

GenotypeStats make_genotype_stats(std::size_t length, double w0, double nu,
                                  double rate) {
  check_formula_args(rate, nu, length);
  GenotypeStats stats;
  stats.length = length;
  stats.w0 = w0;
  stats.nu = nu;
  stats.fidelity = std::pow(1.0 - rate, static_cast<double>(length));
  stats.neutral_fidelity = neutral_fidelity(rate, nu, length);
  stats.w_fidelity = stats.fidelity * w0;
  stats.w_nu = effective_fitness(w0, stats.neutral_fidelity);
  const auto load = mutational_load(rate, length, nu);
  stats.load_exact = load.first;
  stats.load_approx = load.second;
  return stats;
}

std::string format_neutrality_report(const std::string& wild_type_name,
                                     const GenotypeStats& stats,
                                     const NeutralitySpectrum& spectrum,
                                     double rate, std::size_t population_size) {
  std::string out;
  out += "wild_type = " + wild_type_name + "\n";
  out += "length = " + std::to_string(stats.length) + "\n";
  out += "w0 = " + g6(stats.w0) + "\n";
  out += "deleterious = " + std::to_string(spectrum.n_deleterious) + "\n";
  out += "neutral = " + std::to_string(spectrum.n_neutral) + "\n";
  out += "beneficial = " + std::to_string(spectrum.n_beneficial) + "\n";
  out += "nu = " + g6(stats.nu) + "\n";
  out += "F = " + g6(stats.fidelity) + "\n";
  out += "F_nu = " + g6(stats.neutral_fidelity) + "\n";
  out += "w_nu = " + g6(stats.w_nu) + "\n";
  out += "L_exact = " + g6(stats.load_exact) + "\n";
  out += "L_approx = " + g6(stats.load_approx) + "\n";
  out += "R = " + g6(rate) + "\n";
  out += "N = " + std::to_string(population_size) + "\n";
  return out;
}

}  // namespace pressura
