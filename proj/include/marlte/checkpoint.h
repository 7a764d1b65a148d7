#ifndef MARLTE_CHECKPOINT_H_
#define MARLTE_CHECKPOINT_H_

#include <cstdint>
#include <string>
#include <string_view>

#include "marlte/adam.h"
#include "marlte/mpnn.h"

namespace marlte {

// Text checkpoint: model shape, layer table, Adam state and every double as a
// hexfloat, so a save/load round trip is bit-exact.
struct Checkpoint {
  PolicyModel model;
  AdamState adam;
  uint64_t config_hash = 0;
  int episode = 0;
};

std::string CheckpointToText(const PolicyModel& model, const AdamState& adam,
                             uint64_t config_hash, int episode);
Checkpoint CheckpointFromText(std::string_view text);

void SaveCheckpoint(const std::string& path, const PolicyModel& model,
                    const AdamState& adam, uint64_t config_hash, int episode);
Checkpoint LoadCheckpoint(const std::string& path);

// FNV-1a of a file's bytes; throws if unreadable.
uint64_t HashFile(const std::string& path);
std::string HexHash(uint64_t h);

}  // namespace marlte

#endif  // MARLTE_CHECKPOINT_H_
