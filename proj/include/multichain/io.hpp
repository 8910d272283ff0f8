#pragma once

// File formats.
//
// MDP JSON: {"n_states", "n_actions", "reward_bound",
//            "kernel": [s][a][s'] nested arrays, "reward": [s][a]}.
// Policies: {"table": [s][a], "floor": alpha} (a bare [s][a] array is also
// accepted).  Initial distributions: bare [s] array.  All numbers are
// emitted with shortest round-trip precision, so serialization is lossless
// for every double.  Traces go to CSV with columns
// k,J_mu,gap,eta,divergence_to_ref,samples_cum (one row per iterate).

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "multichain/mdp.hpp"
#include "multichain/pma.hpp"

namespace multichain {

using Json = nlohmann::json;

inline Json mdp_to_json(const Mdp& m) {
  Json j;
  j["n_states"] = m.n_states;
  j["n_actions"] = m.n_actions;
  j["reward_bound"] = m.reward_bound;
  Json kernel = Json::array();
  for (int s = 0; s < m.n_states; ++s) {
    Json per_state = Json::array();
    for (int a = 0; a < m.n_actions; ++a) {
      Json row = Json::array();
      for (int t = 0; t < m.n_states; ++t) row.push_back(m.kernel[a](s, t));
      per_state.push_back(std::move(row));
    }
    kernel.push_back(std::move(per_state));
  }
  j["kernel"] = std::move(kernel);
  Json reward = Json::array();
  for (int s = 0; s < m.n_states; ++s) {
    Json row = Json::array();
    for (int a = 0; a < m.n_actions; ++a) row.push_back(m.reward(s, a));
    reward.push_back(std::move(row));
  }
  j["reward"] = std::move(reward);
  return j;
}

inline Mdp mdp_from_json(const Json& j) {
  Mdp m;
  try {
    m.n_states = j.at("n_states").get<int>();
    m.n_actions = j.at("n_actions").get<int>();
    m.reward_bound = j.at("reward_bound").get<double>();
    const auto& kernel = j.at("kernel");
    const auto& reward = j.at("reward");
    if (static_cast<int>(kernel.size()) != m.n_states ||
        static_cast<int>(reward.size()) != m.n_states)
      throw ValidationError("kernel/reward length differs from n_states");
    m.kernel.assign(m.n_actions, Matrix::Zero(m.n_states, m.n_states));
    m.reward.resize(m.n_states, m.n_actions);
    for (int s = 0; s < m.n_states; ++s) {
      if (static_cast<int>(kernel[s].size()) != m.n_actions ||
          static_cast<int>(reward[s].size()) != m.n_actions)
        throw ValidationError("state " + std::to_string(s) +
                              " has the wrong number of actions");
      for (int a = 0; a < m.n_actions; ++a) {
        if (static_cast<int>(kernel[s][a].size()) != m.n_states)
          throw ValidationError("kernel row (s=" + std::to_string(s) +
                                ", a=" + std::to_string(a) +
                                ") has the wrong length");
        for (int t = 0; t < m.n_states; ++t)
          m.kernel[a](s, t) = kernel[s][a][t].get<double>();
        m.reward(s, a) = reward[s][a].get<double>();
      }
    }
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed MDP JSON: ") + e.what());
  }
  return m;
}

inline void save_mdp(const Mdp& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << mdp_to_json(m).dump(1) << "\n";
}

inline Mdp load_mdp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed JSON in ") + path + ": " +
                          e.what());
  }
  return mdp_from_json(j);
}

inline void save_policy(const Policy& p, const std::string& path) {
  Json j;
  Json table = Json::array();
  for (int s = 0; s < p.table.rows(); ++s) {
    Json row = Json::array();
    for (int a = 0; a < p.table.cols(); ++a) row.push_back(p.table(s, a));
    table.push_back(std::move(row));
  }
  j["table"] = std::move(table);
  j["floor"] = p.floor;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(1) << "\n";
}

inline Policy load_policy(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed JSON in ") + path + ": " +
                          e.what());
  }
  const Json& table = j.is_array() ? j : j.at("table");
  Policy p;
  const int n = static_cast<int>(table.size());
  if (n == 0) throw ValidationError("empty policy table in " + path);
  const int na = static_cast<int>(table[0].size());
  p.table.resize(n, na);
  for (int s = 0; s < n; ++s) {
    if (static_cast<int>(table[s].size()) != na)
      throw ValidationError("ragged policy table in " + path);
    for (int a = 0; a < na; ++a) p.table(s, a) = table[s][a].get<double>();
  }
  if (j.is_object() && j.contains("floor")) p.floor = j["floor"].get<double>();
  return p;
}

inline Vector load_distribution(const std::string& path, int n) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed JSON in ") + path + ": " +
                          e.what());
  }
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    throw ValidationError("distribution in " + path + " must be an array of " +
                          std::to_string(n) + " numbers");
  Vector mu(n);
  for (int s = 0; s < n; ++s) mu(s) = j[s].get<double>();
  return mu;
}

namespace detail {

inline std::string csv_num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace detail

/// Writes a trace as CSV: one row per iterate, K iterations giving K + 1
/// rows after the header.
inline void save_trace_csv(const PmaTrace& t, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "k,J_mu,gap,eta,divergence_to_ref,samples_cum\n";
  for (const auto& it : t.iterates)
    out << it.k << ',' << detail::csv_num(it.j_mu) << ','
        << detail::csv_num(it.gap) << ',' << detail::csv_num(it.eta) << ','
        << detail::csv_num(it.divergence_to_ref) << ',' << it.samples_cum
        << "\n";
}

/// Writes a named column per file: one value per line after a header.
inline void save_vector_csv(const Vector& v, const std::string& name,
                            const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "s," << name << "\n";
  for (int s = 0; s < v.size(); ++s)
    out << s << ',' << detail::csv_num(v(s)) << "\n";
}

inline void save_table_csv(const Matrix& t, const std::string& name,
                           const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "s,a," << name << "\n";
  for (int s = 0; s < t.rows(); ++s)
    for (int a = 0; a < t.cols(); ++a)
      out << s << ',' << a << ',' << detail::csv_num(t(s, a)) << "\n";
}

}  // namespace multichain
