#include "marlte/overhead.h"

#include <sstream>
#include <stdexcept>

namespace marlte {

MessageAccounting ParseAccounting(const std::string& name) {
  if (name == "router") return MessageAccounting::kRouter;
  if (name == "link") return MessageAccounting::kLinkGraph;
  throw std::invalid_argument("unknown accounting '" + name + "' (router|link)");
}

std::string AccountingName(MessageAccounting a) {
  return a == MessageAccounting::kRouter ? "router" : "link";
}

OverheadReport OverheadModel(const Topology& topo, const OverheadParams& p) {
  if (p.hidden <= 0 || p.steps <= 0 || !(p.steps_per_second > 0.0) ||
      p.bytes_per_element <= 0 || !(p.header_factor > 0.0)) {
    throw std::invalid_argument("overhead model parameters must be positive");
  }
  double messages = 0.0;
  if (p.accounting == MessageAccounting::kRouter) {
    for (const Link& l : topo.links()) {
      messages += static_cast<double>(topo.out_links(l.src).size());
    }
  } else {
    for (const auto& b : LinkNeighborhoods(topo)) messages += b.size();
  }

  OverheadReport r;
  r.bytes_per_message = p.hidden * p.bytes_per_element * p.header_factor;
  r.messages_per_link_round = messages / topo.link_count();
  r.bytes_per_timestep = messages * p.steps * r.bytes_per_message;
  r.per_link_bytes_per_second =
      r.bytes_per_timestep / topo.link_count() * p.steps_per_second;
  r.per_link_mb_per_second = r.per_link_bytes_per_second / 1e6;

  std::ostringstream a;
  a << "hidden state of " << p.hidden << " elements x " << p.bytes_per_element
    << " bytes x header factor " << p.header_factor << " = "
    << r.bytes_per_message << " bytes per message";
  r.assumptions.push_back(a.str());
  a.str("");
  a << p.steps << " message-passing rounds per time-step";
  r.assumptions.push_back(a.str());
  a.str("");
  if (p.accounting == MessageAccounting::kRouter) {
    a << "router accounting: each link agent lives on its source router and "
         "sends one message per round to every adjacent router";
  } else {
    a << "link-graph accounting: one message per round for every "
         "(link, neighboring link) pair";
  }
  a << " (average " << r.messages_per_link_round << " messages per link)";
  r.assumptions.push_back(a.str());
  a.str("");
  a << p.steps_per_second << " time-steps per second";
  r.assumptions.push_back(a.str());
  r.assumptions.push_back("1 MB = 10^6 bytes");
  return r;
}

}  // namespace marlte
