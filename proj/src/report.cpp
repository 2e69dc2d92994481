#include "mmr/report.hpp"

#include <fmt/chrono.h>
#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>

#include "mmr/economy.hpp"

namespace mmr {
namespace {

std::string cell_label(const StateOfWorld& s) {
  return fmt::format("{:g} {}", s.discount, s.model.name);
}

std::string policy_head(const Policy& p) {
  return p.provenance ? cell_label(*p.provenance) : "NoAbate";
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string peak_years(const std::optional<TemperaturePeak>& p) {
  return p ? fmt::format("{:.0f}", p->years) : "none";
}

}  // namespace

std::string timestamp_line(bool enabled, const std::string& comment) {
  if (!enabled) return {};
  const auto now = std::chrono::time_point_cast<std::chrono::seconds>(
      std::chrono::system_clock::now());
  return fmt::format("{}{}generated {:%Y-%m-%dT%H:%M:%SZ}\n", comment,
                     comment.empty() ? "" : " ", now);
}

std::string solution_csv(const OptimalSolution& sol, const ScenarioConfig& sc,
                         double horizon) {
  const ExpPoly none = cumulative_emissions({}, sc.baseline, sc.e0);
  std::string out =
      "t,year,baseline_gtc,abatement_gtc,cumulative_gtc,temperature_c,"
      "cumulative_no_abatement_gtc\n";
  for (int t = 0; t <= static_cast<int>(horizon); ++t) {
    fmt::format_to(std::back_inserter(out), "{},{},{:.10g},{:.10g},{:.10g},{:.10g},{:.10g}\n",
                   t, sc.start_year + t, sc.baseline(t), sol.abatement(t),
                   sol.cumulative(t), sol.temperature(t), none(t));
  }
  return out;
}

std::string regret_matrix_csv(const RegretMatrix& m, double scale) {
  std::string out = "state";
  for (const auto& p : m.policies) out += "," + p.label();
  out += "\n";
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out += m.states[r].label();
    for (std::size_t c = 0; c < m.cols(); ++c) {
      fmt::format_to(std::back_inserter(out), ",{:.17g}", scale * m.at(r, c));
    }
    out += "\n";
  }
  out += "max_regret";
  for (double v : m.max_regret) fmt::format_to(std::back_inserter(out), ",{:.17g}", scale * v);
  out += "\n";
  return out;
}

std::string regret_table_text(const RegretMatrix& m, double scale,
                              const std::string& stamp) {
  const std::size_t cols = m.cols();
  const std::size_t parts = cols >= 3 ? 3 : 1;
  const std::size_t width = cols / parts;
  std::string out = stamp;
  for (std::size_t part = 0; part < parts; ++part) {
    const std::size_t c0 = part * width;
    const std::size_t c1 = part + 1 == parts ? cols : c0 + width;
    fmt::format_to(std::back_inserter(out), "Part {}\n{:<14}", part + 1, "state");
    for (std::size_t c = c0; c < c1; ++c) {
      const std::string head = policy_head(m.policies[c]) + (c == m.mmr_index ? "*" : "");
      fmt::format_to(std::back_inserter(out), " {:>11}", head);
    }
    out += "\n";
    for (std::size_t r = 0; r < m.rows(); ++r) {
      fmt::format_to(std::back_inserter(out), "{:<14}", cell_label(m.states[r]));
      for (std::size_t c = c0; c < c1; ++c) {
        fmt::format_to(std::back_inserter(out), " {:>11.3f}", scale * m.at(r, c));
      }
      out += "\n";
    }
    fmt::format_to(std::back_inserter(out), "{:<14}", "Max Regret");
    for (std::size_t c = c0; c < c1; ++c) {
      fmt::format_to(std::back_inserter(out), " {:>11.3f}", scale * m.max_regret[c]);
    }
    out += "\n\n";
  }
  const auto& best = m.policies[m.mmr_index];
  fmt::format_to(std::back_inserter(out), "MMR: {} with max regret {:.3f}\n",
                 best.label(), scale * m.max_regret[m.mmr_index]);
  return out;
}

std::string regret_heatmap_svg(const RegretMatrix& m, const std::string& stamp) {
  constexpr int cell = 12, left = 110, top = 90;
  const int w = left + cell * static_cast<int>(m.cols()) + 20;
  const int h = top + cell * static_cast<int>(m.rows()) + 20;
  double vmax = 0.0;
  for (double v : m.values) vmax = std::max(vmax, v);

  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  if (!stamp.empty()) out += "<!-- " + stamp.substr(0, stamp.size() - 1) + " -->\n";
  fmt::format_to(std::back_inserter(out),
                 "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
                 "font-family=\"sans-serif\" font-size=\"8\">\n",
                 w, h);
  fmt::format_to(std::back_inserter(out),
                 "<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", w, h);
  for (std::size_t c = 0; c < m.cols(); ++c) {
    const int x = left + cell * static_cast<int>(c) + cell / 2;
    fmt::format_to(std::back_inserter(out),
                   "<text x=\"{}\" y=\"{}\" transform=\"rotate(-60 {} {})\">{}</text>\n",
                   x, top - 4, x, top - 4, xml_escape(policy_head(m.policies[c])));
  }
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const int y = top + cell * static_cast<int>(r);
    fmt::format_to(std::back_inserter(out),
                   "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", left - 4,
                   y + cell - 3, xml_escape(cell_label(m.states[r])));
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const double v = std::max(0.0, m.at(r, c));
      const double f = vmax > 0.0 ? v / vmax : 0.0;
      // Linear blend from white to saturated red.
      const int gb = static_cast<int>(std::lround(255.0 * (1.0 - f)));
      fmt::format_to(std::back_inserter(out),
                     "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" "
                     "fill=\"#ff{:02x}{:02x}\"><title>{}: {:.3f}</title></rect>\n",
                     left + cell * static_cast<int>(c), y, cell, cell, gb, gb,
                     xml_escape(cell_label(m.states[r]) + " / " + policy_head(m.policies[c])),
                     v);
    }
  }
  const int mx = left + cell * static_cast<int>(m.mmr_index);
  fmt::format_to(std::back_inserter(out),
                 "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" "
                 "stroke=\"black\" stroke-width=\"1.5\"/>\n",
                 mx, top, cell, cell * static_cast<int>(m.rows()));
  out += "</svg>\n";
  return out;
}

std::string sweep_csv(const SweepReport& rep, double scale) {
  std::string out =
      "alpha,beta,mmr_discount,mmr_model,max_regret,hottest_model,peak_years,"
      "tmax_c,tmax_increase_c\n";
  for (const auto& cell : rep.cells) {
    const auto& prov = cell.choice.policy.provenance;
    fmt::format_to(std::back_inserter(out), "{:g},{:g},{},{},{:.17g},{},", cell.alpha,
                   cell.beta, prov ? fmt::format("{:g}", prov->discount) : "",
                   prov ? prov->model.name : "NoAbatement",
                   scale * cell.choice.max_regret, cell.hottest_model.name);
    if (cell.peak) {
      fmt::format_to(std::back_inserter(out), "{:.17g},{:.17g},{:.17g}\n", cell.peak->years,
                     cell.peak->tmax, cell.peak->increase);
    } else {
      out += ",,\n";
    }
  }
  return out;
}

std::string sweep_text(const SweepReport& rep, double scale, const std::string& stamp) {
  std::string out = stamp;
  const auto at = [&](std::size_t i, std::size_t j) -> const SweepCell& {
    return rep.cells[i * rep.betas.size() + j];
  };
  out += "MMR by (alpha, beta)\n";
  for (std::size_t i = 0; i < rep.alphas.size(); ++i) {
    for (std::size_t j = 0; j < rep.betas.size(); ++j) {
      fmt::format_to(std::back_inserter(out), "  {:<28}",
                     fmt::format("alpha={:g} beta={:g}", rep.alphas[i], rep.betas[j]));
    }
    out += "\n";
    for (std::size_t j = 0; j < rep.betas.size(); ++j) {
      fmt::format_to(std::back_inserter(out), "  {:<8}{:>6} {:>12}  ", "Model", "d", "MMR");
    }
    out += "\n";
    for (std::size_t j = 0; j < rep.betas.size(); ++j) {
      const auto& c = at(i, j).choice;
      const auto& p = c.policy.provenance;
      fmt::format_to(std::back_inserter(out), "  {:<8}{:>6} {:>12.3f}  ",
                     p ? p->model.name : "NoAbate",
                     p ? fmt::format("{:.2f}", p->discount) : "-", scale * c.max_regret);
    }
    out += "\n\n";
  }

  out += rep.cells.empty()
             ? "\n"
             : fmt::format("Peak temperature under the MMR policy if {} is the true model\n",
                           rep.cells.front().hottest_model.name);
  for (std::size_t i = 0; i < rep.alphas.size(); ++i) {
    for (std::size_t j = 0; j < rep.betas.size(); ++j) {
      fmt::format_to(std::back_inserter(out), "  {:<28}",
                     fmt::format("alpha={:g} beta={:g}", rep.alphas[i], rep.betas[j]));
    }
    out += "\n";
    for (std::size_t j = 0; j < rep.betas.size(); ++j) {
      fmt::format_to(std::back_inserter(out), "  {:<10}{:>6} {:>10}  ", "MMR Model", "Years", "Tmax");
    }
    out += "\n";
    for (std::size_t j = 0; j < rep.betas.size(); ++j) {
      const auto& c = at(i, j);
      const auto& p = c.choice.policy.provenance;
      fmt::format_to(std::back_inserter(out), "  {:<10}{:>6} {:>10}  ",
                     p ? p->model.name : "NoAbate", peak_years(c.peak),
                     c.peak ? fmt::format("{:.3f}", c.peak->tmax) : "none");
    }
    out += "\n\n";
  }
  return out;
}

std::string fit_report_text(const BaselineFit& fit, const EmissionsSeries& series,
                            const std::string& stamp) {
  const auto& p = fit.params;
  std::string out = stamp;
  fmt::format_to(std::back_inserter(out),
                 "baseline fit ({} form)\n"
                 "  points      {}\n"
                 "  theta       {:.10g}\n"
                 "  phi         {:.10g}\n"
                 "  b0          {:.10g}\n"
                 "  r_squared   {:.6f}\n"
                 "  ssr         {:.6g}\n"
                 "  sst         {:.6g}\n"
                 "  iterations  {}\n",
                 to_string(p.variant), series.points.size(), p.theta, p.phi, p.b0,
                 p.r_squared, fit.ssr, fit.sst, fit.iterations);
  const ExpPoly b = baseline_exppoly(p);
  fmt::format_to(std::back_inserter(out),
                 "  B(0)        {:.4f} GtC/yr\n"
                 "  integral B  {:.4f} GtC\n",
                 b(0.0), cumulative_baseline(b));
  out += "\n  offset    data     fitted\n";
  for (const auto& pt : series.points) {
    if (std::fmod(pt.year_offset, 20.0) != 0.0) continue;
    fmt::format_to(std::back_inserter(out), "  {:>6.0f} {:>8.3f} {:>10.3f}\n",
                   pt.year_offset, pt.emissions, p.evaluate(pt.year_offset));
  }
  return out;
}

}  // namespace mmr
