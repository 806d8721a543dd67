#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <random>

#include "../oracles/coverage_label.hpp"
#include "snorelda/audio_io.hpp"
#include "snorelda/error.hpp"
#include "support.hpp"

using namespace snore;

namespace {

// Minimal RIFF writer for formats the library never writes itself.
std::vector<std::uint8_t> raw_wav(int rate, int channels, int bits, int format,
                                  const std::vector<std::uint8_t>& data) {
  std::vector<std::uint8_t> out;
  auto u32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  };
  auto u16 = [&](std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
  };
  auto tag = [&](const char* t) { out.insert(out.end(), t, t + 4); };
  tag("RIFF");
  u32(static_cast<std::uint32_t>(36 + data.size()));
  tag("WAVE");
  tag("fmt ");
  u32(16);
  u16(static_cast<std::uint16_t>(format));
  u16(static_cast<std::uint16_t>(channels));
  u32(static_cast<std::uint32_t>(rate));
  u32(static_cast<std::uint32_t>(rate * channels * bits / 8));
  u16(static_cast<std::uint16_t>(channels * bits / 8));
  u16(static_cast<std::uint16_t>(bits));
  tag("data");
  u32(static_cast<std::uint32_t>(data.size()));
  out.insert(out.end(), data.begin(), data.end());
  return out;
}

std::vector<std::uint8_t> pcm16_bytes(const std::vector<std::int16_t>& v) {
  std::vector<std::uint8_t> b;
  for (auto s : v) {
    b.push_back(static_cast<std::uint8_t>(s & 0xFF));
    b.push_back(static_cast<std::uint8_t>((s >> 8) & 0xFF));
  }
  return b;
}

}  // namespace

TEST_CASE("16 kHz mono 16-bit WAV of 10 s loads as 160000 samples") {
  auto x = testing::sine(160000, 440.0, 0.5);
  std::vector<float> f(x.begin(), x.end());
  for (float& v : f) v = quantize_pcm16(v);
  const auto bytes = encode_wav_pcm16(f, 16000);
  const Recording rec = canonicalize(decode_wav(bytes), "P001");
  CHECK(rec.samples.size() == 160000);
  CHECK(rec.sample_rate_hz == 16000);
  CHECK(std::equal(rec.samples.begin(), rec.samples.end(), f.begin()));
}

TEST_CASE("32 kHz source of 10 s resamples to 160000 samples") {
  auto x = testing::sine(320000, 440.0, 0.5, 0.0, 32000.0);
  std::vector<float> f(x.begin(), x.end());
  const auto bytes = encode_wav_pcm16(f, 32000);
  const Recording rec = canonicalize(decode_wav(bytes), "P001");
  CHECK(rec.samples.size() == 160000);
  // The 440 Hz tone survives: compare away from the edges.
  const auto ref = testing::sine(160000, 440.0, 0.5);
  double err = 0.0;
  for (std::size_t i = 1000; i < 159000; ++i) err = std::max(err, std::fabs(rec.samples[i] - ref[i]));
  CHECK(err < 2e-3);
}

TEST_CASE("stereo channels x and -x average to silence") {
  std::vector<std::int16_t> inter;
  std::mt19937 rng(3);
  for (int i = 0; i < 16000; ++i) {
    const auto v = static_cast<std::int16_t>(static_cast<int>(rng() % 60000) - 30000);
    inter.push_back(v);
    inter.push_back(static_cast<std::int16_t>(-v));
  }
  const Recording rec = canonicalize(decode_wav(raw_wav(16000, 2, 16, 1, pcm16_bytes(inter))), "P");
  CHECK(rec.samples.size() == 16000);
  CHECK(std::all_of(rec.samples.begin(), rec.samples.end(), [](float v) { return v == 0.0f; }));
}

TEST_CASE("decoder handles 8-bit, 24-bit and float formats") {
  SUBCASE("8-bit unsigned") {
    const auto d = decode_wav(raw_wav(16000, 1, 8, 1, {128, 255, 0}));
    REQUIRE(d.interleaved.size() == 3);
    CHECK(d.interleaved[0] == 0.0f);
    CHECK(d.interleaved[2] == -1.0f);
  }
  SUBCASE("24-bit") {
    const auto d = decode_wav(raw_wav(16000, 1, 24, 1, {0x00, 0x00, 0x40, 0x00, 0x00, 0xC0}));
    REQUIRE(d.interleaved.size() == 2);
    CHECK(d.interleaved[0] == doctest::Approx(0.5));
    CHECK(d.interleaved[1] == doctest::Approx(-0.5));
  }
  SUBCASE("32-bit float") {
    float v[2] = {0.25f, -0.75f};
    std::vector<std::uint8_t> b(reinterpret_cast<std::uint8_t*>(v), reinterpret_cast<std::uint8_t*>(v) + 8);
    const auto d = decode_wav(raw_wav(16000, 1, 32, 3, b));
    REQUIRE(d.interleaved.size() == 2);
    CHECK(d.interleaved[0] == 0.25f);
    CHECK(d.interleaved[1] == -0.75f);
  }
}

TEST_CASE("malformed WAV input is a decode error") {
  auto good = encode_wav_pcm16(std::vector<float>(100, 0.1f), 16000);
  auto bad_kind = [](const std::vector<std::uint8_t>& b) {
    try {
      decode_wav(b);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Usage;
  };
  auto truncated = std::vector<std::uint8_t>(good.begin(), good.begin() + 30);
  CHECK(bad_kind(truncated) == ErrorKind::Decode);
  auto not_riff = good;
  not_riff[0] = 'X';
  CHECK(bad_kind(not_riff) == ErrorKind::Decode);
}

TEST_CASE("non-finite samples are rejected") {
  float v[2] = {0.25f, std::nanf("")};
  std::vector<std::uint8_t> b(reinterpret_cast<std::uint8_t*>(v), reinterpret_cast<std::uint8_t*>(v) + 8);
  CHECK_THROWS_AS(canonicalize(decode_wav(raw_wav(16000, 1, 32, 3, b)), "P"), Error);
}

TEST_CASE("PCM16 write/read round trip is exact on the quantized grid") {
  auto dir = testing::scratch("audio_roundtrip");
  auto x = testing::white(16000, 0.2, 9);
  std::vector<float> f(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) f[i] = quantize_pcm16(static_cast<float>(std::clamp(x[i], -1.0, 1.0)));
  write_wav_pcm16(dir / "a.wav", f, 16000, "config_digest=abc");
  const Recording rec = load_recording(dir / "a.wav", "a");
  CHECK(rec.samples == f);
  CHECK(testing::slurp(dir / "a.wav").find("config_digest=abc") != std::string::npos);
}

TEST_CASE("missing file is an I/O error") {
  try {
    load_recording("/nonexistent/x.wav", "x");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Io);
  }
}

TEST_CASE("35 s recording gives 3 windows and the trailing 5 s is dropped") {
  const Recording rec = testing::recording(testing::white(35 * 16000, 0.1, 1));
  const auto w = window_recording(rec);
  REQUIRE(w.size() == 3);
  CHECK(w[2].start_s == 20.0);
}

TEST_CASE("concatenated windows reproduce the recording prefix exactly") {
  const Recording rec = testing::recording(testing::white(35 * 16000, 0.1, 2));
  const auto w = window_recording(rec);
  std::size_t k = 0;
  bool same = true;
  for (const auto& win : w) {
    REQUIRE(win.samples.size() == kWindowSamples);
    for (double v : win.samples) same = same && v == static_cast<double>(rec.samples[k++]);
  }
  CHECK(same);
  CHECK(k == 3 * kWindowSamples);
}

TEST_CASE("window labels follow majority coverage") {
  const Recording rec = testing::recording(std::vector<double>(30 * 16000, 0.0), "P001");
  SUBCASE("window inside an OSA event") {
    std::vector<LabeledEvent> ev{{"P001", 5.0, 25.0, SoundClass::OsaSnore}};
    const auto w = window_recording(rec, ev);
    CHECK(w[1].label == SoundClass::OsaSnore);
    CHECK(w[0].label == SoundClass::Other);  // 5 s OSA against 5 s unlabeled is a tie
  }
  SUBCASE("6 s simple snore and 4 s unlabeled") {
    std::vector<LabeledEvent> ev{{"P001", 0.0, 6.0, SoundClass::SimpleSnore}};
    CHECK(window_recording(rec, ev)[0].label == SoundClass::SimpleSnore);
  }
  SUBCASE("no covering event") {
    std::vector<LabeledEvent> ev{{"P001", 0.0, 6.0, SoundClass::SimpleSnore}};
    CHECK(window_recording(rec, ev)[2].label == SoundClass::Other);
  }
}

TEST_CASE("majority label agrees with the dense-sampling oracle on frozen cases") {
  std::ifstream in(testing::golden("window_labels.txt"));
  REQUIRE(in);
  std::string line;
  int cases = 0;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::vector<LabeledEvent> events;
    std::vector<oracle::Interval> intervals;
    std::string tok;
    while (ss >> tok && tok != "|") {
      double s = std::stod(tok), e;
      int c;
      ss >> e >> c;
      events.push_back({"P", s, e, static_cast<SoundClass>(c)});
      intervals.push_back({s, e, c});
    }
    double start;
    int expected;
    ss >> start >> tok >> expected;
    CHECK(static_cast<int>(majority_label(events, start, start + 10.0)) == expected);
    CHECK(oracle::sampled_label(intervals, start, start + 10.0) == expected);
    ++cases;
  }
  CHECK(cases >= 8);
}

TEST_CASE("majority label is invariant under permutation of the event list") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<LabeledEvent> ev;
    double t = 0.0;
    while (t < 30.0) {
      const double len = 0.5 + (rng() % 1000) / 200.0;
      if (rng() % 3) ev.push_back({"P", t, t + len, static_cast<SoundClass>(rng() % 3)});
      t += len;
    }
    const auto before = majority_label(ev, 10.0, 20.0);
    std::shuffle(ev.begin(), ev.end(), rng);
    CHECK(majority_label(ev, 10.0, 20.0) == before);
  }
}

TEST_CASE("window count depends only on sample count") {
  const Recording rec = testing::recording(std::vector<double>(25 * 16000, 0.0), "P001");
  std::vector<LabeledEvent> ev{{"P001", 0.0, 25.0, SoundClass::OsaSnore}};
  CHECK(window_recording(rec, ev).size() == window_recording(rec).size());
  CHECK(window_count(159999) == 0);
  CHECK(window_count(160000) == 1);
}

TEST_CASE("overlapping labels are a validation error") {
  const Recording rec = testing::recording(std::vector<double>(20 * 16000, 0.0), "P001");
  std::vector<LabeledEvent> ev{{"P001", 0.0, 6.0, SoundClass::OsaSnore}, {"P001", 5.0, 9.0, SoundClass::Other}};
  try {
    window_recording(rec, ev);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Validation);
  }
  std::vector<LabeledEvent> touching{{"P001", 0.0, 5.0, SoundClass::OsaSnore}, {"P001", 5.0, 9.0, SoundClass::Other}};
  CHECK_NOTHROW(window_recording(rec, touching));
}

TEST_CASE("labels for another patient are rejected") {
  const Recording rec = testing::recording(std::vector<double>(20 * 16000, 0.0), "P001");
  std::vector<LabeledEvent> ev{{"P002", 0.0, 6.0, SoundClass::OsaSnore}};
  CHECK_THROWS_AS(window_recording(rec, ev), Error);
}

TEST_CASE("labels CSV round trip") {
  std::vector<LabeledEvent> ev{{"P001", 0.0, 10.0, SoundClass::OsaSnore},
                               {"P001", 10.0, 12.5, SoundClass::SimpleSnore},
                               {"P002", 3.25, 7.0, SoundClass::Other}};
  const std::string text = format_labels_csv(ev, "config_digest=x");
  CHECK(text.rfind("# config_digest=x\n", 0) == 0);
  CHECK(parse_labels_csv(text) == ev);
  CHECK_THROWS_AS(parse_labels_csv("patient_id,start_s,end_s,label\nP,0,1,snoring\n"), Error);
  CHECK_THROWS_AS(parse_labels_csv("patient_id,start_s,end_s,label\nP,2,1,other\n"), Error);
}
