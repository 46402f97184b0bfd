// Copyright 2026 The PrivGLM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "privglm/csv.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "privglm/synthetic.hpp"

namespace privglm {
namespace {

class CsvTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("privglm_csv_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::string write_file(const std::string& name, const std::string& body) {
    const std::string path = (dir_ / name).string();
    std::ofstream out(path);
    out << body;
    return path;
  }

  std::filesystem::path dir_;
};

TEST_F(CsvTest, ParsesSmallFile) {
  const std::string path =
      write_file("small.csv", "y,a,b\n1,0.5,-0.25\n0,-1,1\n");
  const Dataset data = load_csv(path, "y");
  EXPECT_EQ(data.n(), 2);
  EXPECT_EQ(data.d(), 2);
  EXPECT_EQ(data.y[0], 1.0);
  EXPECT_EQ(data.y[1], 0.0);
  EXPECT_EQ(data.x(0, 0), 0.5);
  EXPECT_EQ(data.x(0, 1), -0.25);
  EXPECT_EQ(data.x(1, 0), -1.0);
  EXPECT_EQ(data.x(1, 1), 1.0);
}

TEST_F(CsvTest, LabelColumnAnywhere) {
  const std::string path =
      write_file("mid.csv", "a,y,b\n0.5,1,-0.25\n-1,0,1\n");
  const Dataset data = load_csv(path, "y");
  EXPECT_EQ(data.y[0], 1.0);
  EXPECT_EQ(data.x(0, 0), 0.5);
  EXPECT_EQ(data.x(0, 1), -0.25);
}

TEST_F(CsvTest, NanCellNamesLine) {
  const std::string path =
      write_file("nan.csv", "y,a\n1,0.5\n0,NaN\n");
  try {
    load_csv(path, "y");
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos)
        << e.what();
  }
}

TEST_F(CsvTest, EmptyFileRejected) {
  const std::string path = write_file("empty.csv", "");
  try {
    load_csv(path, "y");
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("no rows"), std::string::npos);
  }
  const std::string header_only = write_file("header.csv", "y,a\n");
  EXPECT_THROW(load_csv(header_only, "y"), DataError);
}

TEST_F(CsvTest, UnknownLabelColumnRejected) {
  const std::string path = write_file("nolabel.csv", "y,a\n1,0.5\n");
  EXPECT_THROW(load_csv(path, "label"), DataError);
}

TEST_F(CsvTest, MissingValueNamesLine) {
  const std::string path = write_file("missing.csv", "y,a,b\n1,0.5,\n");
  try {
    load_csv(path, "y");
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST_F(CsvTest, NonNumericFeatureNamesLine) {
  const std::string path = write_file("text.csv", "y,a\n1,0.5\n0,oops\n");
  try {
    load_csv(path, "y");
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("oops"), std::string::npos);
  }
}

TEST_F(CsvTest, RaggedRowRejected) {
  const std::string path = write_file("ragged.csv", "y,a,b\n1,0.5\n");
  EXPECT_THROW(load_csv(path, "y"), DataError);
}

TEST_F(CsvTest, BinaryTextLabelsMapped) {
  const std::string path = write_file(
      "labels.csv", "cls,a\nFlocking,0.5\nNot,1.0\nFlocking,-0.5\n");
  const Dataset data = load_csv(path, "cls");
  // Lexicographic: "Flocking" -> 0, "Not" -> 1.
  EXPECT_EQ(data.y[0], 0.0);
  EXPECT_EQ(data.y[1], 1.0);
  EXPECT_EQ(data.y[2], 0.0);
}

TEST_F(CsvTest, MoreThanTwoTextLabelsRejected) {
  const std::string path =
      write_file("multi.csv", "cls,a\nx,1\ny,2\nz,3\n");
  EXPECT_THROW(load_csv(path, "cls"), DataError);
}

TEST_F(CsvTest, RoundTripPreservesValues) {
  SyntheticSpec spec;
  spec.n = 40;
  spec.d = 7;
  spec.seed = 77;
  auto [data, truth] = generate_synthetic(spec);
  const std::string path = (dir_ / "roundtrip.csv").string();
  write_dataset_csv(path, data, "y");
  const Dataset reloaded = load_csv(path, "y");
  ASSERT_EQ(reloaded.n(), data.n());
  ASSERT_EQ(reloaded.d(), data.d());
  EXPECT_EQ(reloaded.y, data.y);
  EXPECT_EQ(reloaded.x, data.x);

  // A second write of the reloaded dataset is byte-identical.
  const std::string path2 = (dir_ / "roundtrip2.csv").string();
  write_dataset_csv(path2, reloaded, "y");
  std::ifstream f1(path), f2(path2);
  const std::string body1((std::istreambuf_iterator<char>(f1)),
                          std::istreambuf_iterator<char>());
  const std::string body2((std::istreambuf_iterator<char>(f2)),
                          std::istreambuf_iterator<char>());
  EXPECT_EQ(body1, body2);
}

TEST_F(CsvTest, MissingFileRejected) {
  EXPECT_THROW(load_csv((dir_ / "absent.csv").string(), "y"), DataError);
}

}  // namespace
}  // namespace privglm
