#include "ncm/io.hpp"
#include "ncm/random.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace ncm;
using nlohmann::json;

TEST(MatrixFile, FlatAndNested) {
  const json flat = json::parse(R"({"dim": 2, "matrices": [[[1, 0], [0, 2], [3, 0], 4]]})");
  const auto a = matrix_family_from_json(flat);
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a[0](0, 1), Complex(0, 2));
  EXPECT_EQ(a[0](1, 0), Complex(3, 0));
  EXPECT_EQ(a[0](1, 1), Complex(4, 0));
  const json nested = json::parse(R"({"dim": 2, "matrices": [[[[1, 0], [0, 2]], [[3, 0], 4]]]})");
  EXPECT_EQ(matrix_family_from_json(nested)[0], a[0]);
  const json one = json::parse(R"({"dim": 1, "matrices": [[[5, 1]], [[7]]]})");
  const auto b = matrix_family_from_json(one);
  EXPECT_EQ(b[0](0, 0), Complex(5, 1));
  EXPECT_EQ(b[1](0, 0), Complex(7, 0));
}

TEST(MatrixFile, Rejects) {
  for (const char* text : {R"([1, 2])", R"({"matrices": []})", R"({"dim": 0, "matrices": []})",
                           R"({"dim": 2, "matrices": [[1, 2, 3]]})", R"({"dim": 1, "matrices": [["x"]]})",
                           R"({"dim": 1, "matrices": [[[1, 2, 3]]]})"})
    EXPECT_THROW(matrix_family_from_json(json::parse(text)), InputError) << text;
}

TEST(MatrixFile, RoundTrip) {
  Rng rng = make_rng(71);
  const std::vector<ComplexMatrix> fam{random_gaussian(3, rng), random_gaussian(3, rng)};
  const auto path = std::filesystem::temp_directory_path() / "ncm_io_roundtrip.json";
  write_matrix_file(path, fam);
  const auto back = read_matrix_file(path);
  ASSERT_EQ(back.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(back[i], fam[i]);
  std::filesystem::remove(path);
  EXPECT_THROW(read_matrix_file(path), InputError);
}

TEST(SpanMapFile, RoundTripAndValidation) {
  const SpanMap u = SpanMap::transposition(2);
  const SpanMap back = span_map_from_json(span_map_to_json(u));
  EXPECT_EQ(back.size(), 4);
  EXPECT_TRUE(back.unital());
  for (int i = 0; i < 4; ++i) EXPECT_EQ(back.images()[i], u.images()[i]);
  const json dependent = json::parse(
      R"({"basis": {"dim": 1, "matrices": [[1], [2]]}, "images": {"dim": 1, "matrices": [[1], [2]]}})");
  EXPECT_THROW(span_map_from_json(dependent), InputError);
  EXPECT_THROW(span_map_from_json(json::parse(R"({"basis": {"dim": 1, "matrices": [[1]]}})")), InputError);
}
