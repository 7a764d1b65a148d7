#include "marlte/checkpoint.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <gtest/gtest.h>

#include "fixtures.h"

namespace marlte {
namespace {

std::string TempPath(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("marlte_ckpt_" + name)).string();
}

// A model and optimizer state with non-trivial moments.
struct Trained {
  PolicyModel model;
  AdamState adam;
};

Trained MakeTrained() {
  Trained t;
  t.model.Initialize(42);
  t.adam = AdamState(AdamConfig{}, t.model.params().size());
  Rng rng(1);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int s = 0; s < 3; ++s) {
    std::vector<double> grads(t.model.params().size());
    for (double& x : grads) x = g(rng);
    t.adam.Step(t.model.params(), grads);
  }
  return t;
}

TEST(Checkpoint, RoundTripIsBitExact) {
  Trained t = MakeTrained();
  std::string path = TempPath("roundtrip");
  SaveCheckpoint(path, t.model, t.adam, 0xdeadbeefcafef00dull, 17);
  Checkpoint c = LoadCheckpoint(path);
  EXPECT_EQ(c.config_hash, 0xdeadbeefcafef00dull);
  EXPECT_EQ(c.episode, 17);
  ASSERT_EQ(c.model.params().size(), t.model.params().size());
  for (size_t i = 0; i < t.model.params().size(); ++i) {
    EXPECT_EQ(c.model.params().flat()[i], t.model.params().flat()[i]);
  }
  EXPECT_EQ(c.adam.step(), t.adam.step());
  EXPECT_EQ(c.adam.first_moment(), t.adam.first_moment());
  EXPECT_EQ(c.adam.second_moment(), t.adam.second_moment());
  EXPECT_EQ(c.adam.config().learning_rate, t.adam.config().learning_rate);
  // Saving the loaded state reproduces the same bytes.
  EXPECT_EQ(CheckpointToText(c.model, c.adam, c.config_hash, c.episode),
            CheckpointToText(t.model, t.adam, 0xdeadbeefcafef00dull, 17));
  // Same outputs on a real topology.
  Topology topo = testing_util::LoadData("toy5.topo");
  LinkNeighborhood nbr = LinkNeighborhoods(topo);
  RowMatrix x = RowMatrix::Constant(topo.link_count(), 2, 0.3);
  EXPECT_EQ(ActorForward(c.model, x, nbr).logits, ActorForward(t.model, x, nbr).logits);
  std::remove(path.c_str());
}

TEST(Checkpoint, PreservesNonDefaultShape) {
  PolicyModel model(MpnnConfig{8, 3, 12});
  model.Initialize(5);
  AdamState adam(AdamConfig{}, model.params().size());
  Checkpoint c = CheckpointFromText(CheckpointToText(model, adam, 1, 0));
  EXPECT_EQ(c.model.config().hidden, 8);
  EXPECT_EQ(c.model.config().steps, 3);
  EXPECT_EQ(c.model.config().mlp_width, 12);
  EXPECT_EQ(c.model.params().size(), model.params().size());
}

TEST(Checkpoint, MissingFileThrows) {
  EXPECT_THROW(LoadCheckpoint(TempPath("does_not_exist")), std::runtime_error);
  EXPECT_THROW(HashFile(TempPath("does_not_exist")), std::runtime_error);
}

TEST(Checkpoint, CorruptedInputRejected) {
  Trained t = MakeTrained();
  std::string text = CheckpointToText(t.model, t.adam, 3, 1);
  EXPECT_THROW(CheckpointFromText(""), std::runtime_error);
  EXPECT_THROW(CheckpointFromText("not-a-checkpoint 1\n"), std::runtime_error);
  // Truncated in the middle of the parameters.
  EXPECT_THROW(CheckpointFromText(text.substr(0, text.size() / 2)), std::runtime_error);
  // A garbled number.
  std::string garbled = text;
  size_t pos = garbled.find("params ");
  pos = garbled.find('\n', pos) + 1;
  garbled.replace(pos, 4, "zzzz");
  EXPECT_THROW(CheckpointFromText(garbled), std::runtime_error);
  // Missing trailer.
  std::string no_end = text.substr(0, text.rfind("end"));
  EXPECT_THROW(CheckpointFromText(no_end), std::runtime_error);
}

TEST(Checkpoint, HashFileIsFnv1a) {
  std::string path = TempPath("hash");
  {
    std::ofstream out(path, std::ios::binary);
    out << "a";
  }
  // FNV-1a 64 of "a".
  EXPECT_EQ(HashFile(path), 0xaf63dc4c8601ec8cull);
  EXPECT_EQ(HexHash(0xaf63dc4c8601ec8cull), "af63dc4c8601ec8c");
  std::remove(path.c_str());
}

}  // namespace
}  // namespace marlte
