#ifndef MARLTE_OVERHEAD_H_
#define MARLTE_OVERHEAD_H_

#include <string>
#include <utility>
#include <vector>

#include "marlte/topology.h"

namespace marlte {

// Which transmissions count as network messages in one message-passing round.
enum class MessageAccounting {
  // Each link agent runs on its source router and sends its hidden state to
  // every router adjacent to that router: deg(src) messages per link.
  kRouter,
  // Every (e, i in B(e)) neighbor pair is a separate message: |B(e)| per link.
  kLinkGraph,
};

MessageAccounting ParseAccounting(const std::string& name);
std::string AccountingName(MessageAccounting a);

struct OverheadParams {
  int hidden = 16;
  int steps = 8;  // message-passing rounds per time-step
  double steps_per_second = 0.0;
  int bytes_per_element = 4;
  double header_factor = 1.2;
  MessageAccounting accounting = MessageAccounting::kRouter;
};

struct OverheadReport {
  double bytes_per_message = 0.0;        // hidden * bytes * header_factor
  double messages_per_link_round = 0.0;  // average over links
  double bytes_per_timestep = 0.0;       // whole network
  double per_link_bytes_per_second = 0.0;
  double per_link_mb_per_second = 0.0;   // 1 MB = 10^6 bytes
  std::vector<std::string> assumptions;
};

OverheadReport OverheadModel(const Topology& topo, const OverheadParams& params);

}  // namespace marlte

#endif  // MARLTE_OVERHEAD_H_
