#include <gtest/gtest.h>

#include <cmath>

#include "ixsim/protocol.hpp"
#include "message_gen.hpp"

using namespace ixsim;

namespace
{

PoseCommand zero_command(std::uint64_t seq)
{
  PoseCommand c;
  c.seq = seq;
  c.session_id = "s";
  return c;
}

}  // namespace

TEST(Encode, ZeroCommandIsOneLine)
{
  const std::string frame = encode(zero_command(1));
  ASSERT_FALSE(frame.empty());
  EXPECT_EQ(frame.back(), '\n');
  EXPECT_EQ(frame.find('\n'), frame.size() - 1);
  EXPECT_EQ(frame.rfind("{\"type\":\"cmd\"", 0), 0u);
  EXPECT_NE(frame.find("\"seq\":1"), std::string::npos);
  const auto j = nlohmann::json::parse(frame);
  for (const char * k : {"x", "y", "z", "pitch", "yaw", "roll"}) {
    EXPECT_EQ(j["delta"][k].get<double>(), 0.0);
  }
  EXPECT_EQ(j["axial_feed"].get<double>(), 0.0);
}

TEST(Encode, NonFiniteRejected)
{
  PoseCommand c = zero_command(1);
  c.delta.x = NAN;
  EXPECT_THROW(encode(c), EncodeError);
  StateUpdate s;
  s.sim_time = INFINITY;
  EXPECT_THROW(encode(s), EncodeError);
}

TEST(Encode, FullPrecisionNumbers)
{
  PoseCommand c = zero_command(2);
  c.delta.x = 0.1 + 0.2;
  c.axial_feed = 1.0 / 3.0;
  const auto r = decode_line(encode(c));
  const auto & back = std::get<PoseCommand>(std::get<Message>(r));
  EXPECT_EQ(back.delta.x, c.delta.x);
  EXPECT_EQ(back.axial_feed, c.axial_feed);
}

TEST(Decode, RoundTripGeneratedMessages)
{
  Rng r(1234);
  for (int i = 0; i < 2000; ++i) {
    const Message m = ixsim::testing::random_message(r);
    const auto out = decode(encode(m));
    ASSERT_EQ(out.frames.size(), 1u);
    ASSERT_TRUE(out.remaining.empty());
    const auto * msg = std::get_if<Message>(&out.frames[0]);
    ASSERT_NE(msg, nullptr) << std::get<FrameError>(out.frames[0]).reason;
    ASSERT_EQ(*msg, m) << encode(m);
  }
}

TEST(Decode, MissingLfIsHeld)
{
  std::string frame = encode(zero_command(1));
  frame.pop_back();
  const auto out = decode(frame);
  EXPECT_TRUE(out.frames.empty());
  EXPECT_EQ(out.remaining, frame);
}

TEST(Decode, TwoCompleteLines)
{
  const auto out = decode(encode(zero_command(1)) + encode(zero_command(2)));
  EXPECT_EQ(out.frames.size(), 2u);
  EXPECT_TRUE(out.remaining.empty());
}

TEST(Decode, CompletePlusHalfLine)
{
  const std::string second = encode(zero_command(2));
  const std::string half = second.substr(0, second.size() / 2);
  const auto out = decode(encode(zero_command(1)) + half);
  EXPECT_EQ(out.frames.size(), 1u);
  EXPECT_EQ(out.remaining, half);
}

TEST(Decode, GarbageBetweenValidLines)
{
  const auto out = decode(encode(zero_command(1)) + "{not json\n" + encode(zero_command(2)));
  ASSERT_EQ(out.frames.size(), 3u);
  EXPECT_TRUE(std::holds_alternative<Message>(out.frames[0]));
  ASSERT_TRUE(std::holds_alternative<FrameError>(out.frames[1]));
  EXPECT_EQ(std::get<FrameError>(out.frames[1]).line, "{not json");
  EXPECT_TRUE(std::holds_alternative<Message>(out.frames[2]));
}

TEST(Decode, UnknownFieldsIgnored)
{
  const auto r = decode_line(
    R"({"type":"cmd","seq":4,"session_id":"a","future":[1,2],"delta":{"x":1,"y":0,"z":0,"pitch":0,"yaw":0,"roll":0,"w":9}})");
  const auto * m = std::get_if<Message>(&r);
  ASSERT_NE(m, nullptr);
  EXPECT_EQ(std::get<PoseCommand>(*m).seq, 4u);
  EXPECT_EQ(std::get<PoseCommand>(*m).delta.x, 1.0);
}

TEST(Decode, StructuralErrors)
{
  EXPECT_TRUE(std::holds_alternative<FrameError>(decode_line("[1,2]")));
  EXPECT_TRUE(std::holds_alternative<FrameError>(decode_line(R"({"type":"dance"})")));
  EXPECT_TRUE(std::holds_alternative<FrameError>(decode_line(R"({"seq":1})")));
  EXPECT_TRUE(std::holds_alternative<FrameError>(decode_line(R"({"type":"cmd","seq":-1,"session_id":"a","delta":{}})")));
  EXPECT_TRUE(std::holds_alternative<FrameError>(decode_line(R"({"type":"cmd","seq":"1","session_id":"a"})")));
}

TEST(Decode, CrLfTolerated)
{
  std::string frame = encode(zero_command(3));
  frame.insert(frame.size() - 1, "\r");
  const auto out = decode(frame);
  ASSERT_EQ(out.frames.size(), 1u);
  EXPECT_TRUE(std::holds_alternative<Message>(out.frames[0]));
}

TEST(FrameDecoder, ByteAtATime)
{
  Rng r(5);
  std::string stream;
  std::vector<Message> sent;
  for (int i = 0; i < 50; ++i) {
    sent.push_back(ixsim::testing::random_message(r));
    stream += encode(sent.back());
  }
  FrameDecoder dec;
  std::vector<Message> got;
  for (char c : stream) {
    for (auto & f : dec.feed(std::string_view(&c, 1))) {
      got.push_back(std::get<Message>(f));
    }
  }
  EXPECT_EQ(got, sent);
  EXPECT_TRUE(dec.pending().empty());
}

TEST(EventJson, RoundTrip)
{
  Rng r(6);
  for (int i = 0; i < 500; ++i) {
    const TrialEvent e = ixsim::testing::random_event(r);
    ASSERT_EQ(event_from_json(event_to_json(e)), e);
  }
}
