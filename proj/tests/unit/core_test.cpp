#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "drl/core/errors.hpp"
#include "drl/core/hash.hpp"
#include "drl/core/rng.hpp"
#include "drl/core/serialize.hpp"
#include "drl/core/types.hpp"
#include "drl/envs/make_env.hpp"

namespace drl {
namespace {

MixedState random_state(const StateSchema& schema, RngStream& rng) {
  MixedState s;
  for (int i = 0; i < schema.n_continuous; ++i) s.continuous.push_back(rng.uniform(-3.0, 3.0));
  for (int c : schema.categorical_cards) s.categorical.push_back({c, rng.uniform_int(c)});
  return s;
}

StateSchema random_schema(RngStream& rng) {
  StateSchema s;
  s.n_continuous = rng.uniform_int(4);
  const int slots = 1 + rng.uniform_int(3);
  for (int i = 0; i < slots; ++i) s.categorical_cards.push_back(2 + rng.uniform_int(6));
  return s;
}

TEST(Encode, OneHotAfterContinuous) {
  const StateSchema schema{1, {3}};
  const MixedState s{{0.5}, {{3, 2}}};
  EXPECT_EQ(encode(s, schema), (std::vector<double>{0.5, 0, 0, 1}));
}

TEST(Encode, NoContinuousPart) {
  const StateSchema schema{0, {2}};
  const MixedState s{{}, {{2, 0}}};
  EXPECT_EQ(encode(s, schema), (std::vector<double>{1, 0}));
}

TEST(Encode, MiniMeleeStartState) {
  RngStream rng(1, 0);
  auto game = envs::make_two_player_env("minimelee", {}, rng);
  game->reset(rng);
  const auto obs = game->observe(0);
  // 8 continuous features and two animation slots of 6 values.
  EXPECT_EQ(encode(obs, game->schema()).size(), 8u + 6u + 6u);
  EXPECT_EQ(game->schema().encoded_size(), 20);
}

TEST(Encode, SchemaMismatchIsContractViolation) {
  const StateSchema schema{1, {3}};
  EXPECT_THROW(encode(MixedState{{0.5, 1.0}, {{3, 0}}}, schema), ContractViolation);
  EXPECT_THROW(encode(MixedState{{0.5}, {{3, 3}}}, schema), ContractViolation);
  EXPECT_THROW(encode(MixedState{{0.5}, {{4, 0}}}, schema), ContractViolation);
  EXPECT_THROW(encode(MixedState{{std::nan("")}, {{3, 0}}}, schema), ContractViolation);
}

TEST(DecodeHard, ArgmaxAndTies) {
  const StateSchema schema{0, {3}};
  EXPECT_EQ(decode_hard(StateDistribution{{}, {{0.1, 2.0, -1.0}}}, schema).categorical[0].index, 1);
  const StateSchema two{0, {2}};
  EXPECT_EQ(decode_hard(StateDistribution{{}, {{0.0, 0.0}}}, two).categorical[0].index, 0);
}

TEST(DecodeHard, NonFiniteLogitsRejected) {
  const StateSchema schema{0, {2}};
  EXPECT_THROW(decode_hard(StateDistribution{{}, {{std::nan(""), 0.0}}}, schema), ContractViolation);
  EXPECT_THROW(decode_hard(StateDistribution{{}, {{std::numeric_limits<double>::infinity(), 0.0}}}, schema),
               ContractViolation);
}

TEST(Lift, DegenerateLogits) {
  const StateSchema schema{2, {3}};
  const auto d = lift(MixedState{{1.5, -0.2}, {{3, 2}}}, schema);
  EXPECT_EQ(d.categorical_logits[0], (std::vector<double>{-10, -10, 10}));
  EXPECT_EQ(d.continuous_mean, (std::vector<double>{1.5, -0.2}));
}

TEST(RoundTrip, ThousandRandomStates) {
  RngStream rng(42, 0);
  for (int i = 0; i < 1000; ++i) {
    const auto schema = random_schema(rng);
    const auto s = random_state(schema, rng);
    const auto lifted = lift(s, schema);
    EXPECT_EQ(decode_hard(lifted, schema), s);
    EXPECT_EQ(lift(decode_hard(lifted, schema), schema), lifted);
    EXPECT_EQ(unflatten(flatten(lifted), schema), lifted);

    const auto x = encode(s, schema);
    ASSERT_EQ(static_cast<int>(x.size()), schema.encoded_size());
    std::size_t at = static_cast<std::size_t>(schema.n_continuous);
    for (std::size_t k = 0; k < schema.categorical_cards.size(); ++k) {
      const int card = schema.categorical_cards[k];
      double sum = 0.0;
      int hot = -1;
      for (int j = 0; j < card; ++j) {
        sum += x[at + static_cast<std::size_t>(j)];
        if (x[at + static_cast<std::size_t>(j)] == 1.0) hot = j;
      }
      EXPECT_EQ(sum, 1.0);
      EXPECT_EQ(hot, s.categorical[k].index);
      at += static_cast<std::size_t>(card);
    }
  }
}

TEST(Schema, CardinalityBelowTwoRejected) {
  EXPECT_THROW((StateSchema{1, {1}}.validate()), ContractViolation);
  EXPECT_NO_THROW((StateSchema{0, {2, 6}}.validate()));
}

TEST(Rng, SameSeedAndStreamSameSequence) {
  RngStream a(7, 3), b(7, 3), c(7, 4), d(8, 3);
  bool differs_c = false, differs_d = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    differs_c |= x != c.next_u64();
    differs_d |= x != d.next_u64();
  }
  EXPECT_TRUE(differs_c);
  EXPECT_TRUE(differs_d);
}

TEST(Rng, FrozenFirstOutputs) {
  EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafull);
  std::mt19937_64 ref(splitmix64(splitmix64(5) ^ splitmix64(~std::uint64_t{9})));
  RngStream r(5, 9);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(r.next_u64(), ref());
}

TEST(Rng, DistributionsInRange) {
  RngStream r(1, 1);
  double sum = 0.0, sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const int k = r.uniform_int(5);
    ASSERT_GE(k, 0);
    ASSERT_LT(k, 5);
    const double z = r.normal();
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.05);
  EXPECT_NEAR(sq / n, 1.0, 0.05);
  const std::vector<double> probs{0.0, 1.0, 0.0};
  for (int i = 0; i < 50; ++i) EXPECT_EQ(r.categorical(probs), 1);
}

TEST(Rng, SaveAndLoadState) {
  RngStream r(3, 3);
  r.uniform();
  const auto saved = r.save_state();
  const double next = r.uniform();
  RngStream s(0, 0);
  s.load_state(saved);
  EXPECT_EQ(s.uniform(), next);
  EXPECT_EQ(s.seed(), 3u);
}

TEST(Rng, DerivedStreamsDiffer) {
  const RngStream base(11, 2);
  auto a = base.derive(0), b = base.derive(1), a2 = base.derive(0);
  const auto x = a.next_u64();
  EXPECT_EQ(x, a2.next_u64());
  EXPECT_NE(x, b.next_u64());
}

TEST(Archive, RoundTripAndLittleEndian) {
  ByteWriter w;
  w.u32(0x01020304u);
  w.f64(-2.5);
  w.str("abc");
  w.f64s(std::vector<double>{1.0, std::nextafter(1.0, 2.0)});
  EXPECT_EQ(static_cast<unsigned char>(w.bytes()[0]), 0x04);
  ByteReader r(w.bytes());
  EXPECT_EQ(r.u32(), 0x01020304u);
  EXPECT_EQ(r.f64(), -2.5);
  EXPECT_EQ(r.str(), "abc");
  EXPECT_EQ(r.f64s(), (std::vector<double>{1.0, std::nextafter(1.0, 2.0)}));
  EXPECT_TRUE(r.done());

  Archive a;
  a.put("SCHM", "xy");
  a.put("PARM", w.bytes());
  const auto bytes = a.serialize();
  EXPECT_EQ(bytes.substr(0, 4), "DRL1");
  const auto b = Archive::parse(bytes);
  EXPECT_EQ(b.tags(), (std::vector<std::string>{"SCHM", "PARM"}));
  EXPECT_EQ(b.get("PARM"), w.bytes());
  EXPECT_THROW(b.get("NOPE"), UsageError);
}

TEST(Archive, CorruptInputRejected) {
  Archive a;
  a.put("SCHM", "payload");
  auto bytes = a.serialize();
  EXPECT_ANY_THROW(Archive::parse("XXXX" + bytes.substr(4)));
  EXPECT_ANY_THROW(Archive::parse(bytes.substr(0, bytes.size() - 2)));
  ByteReader r(std::string_view("\x01\x02", 2));
  EXPECT_ANY_THROW(r.u32());
}

TEST(Archive, SchemaAndStateRecords) {
  const StateSchema schema{2, {3, 6}};
  const MixedState s{{0.25, -1.0}, {{3, 1}, {6, 5}}};
  ByteWriter w;
  write_schema(w, schema);
  write_state(w, s);
  ByteReader r(w.bytes());
  EXPECT_EQ(read_schema(r), schema);
  EXPECT_EQ(read_state(r), s);
}

TEST(Hash, Fnv1aKnownValues) {
  // Reference values of the published FNV-1a 64 test vectors.
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ull);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cull);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ull);
  EXPECT_EQ(hex64(0xabcull), "0000000000000abc");
}

}  // namespace
}  // namespace drl
