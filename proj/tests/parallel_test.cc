/* Copyright 2026 The EgoSDE Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include "egosde/parallel.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace egosde {
namespace {

class ScopedEnv {
 public:
  ScopedEnv(const char* name, const char* value) : name_(name) {
    if (const char* old = std::getenv(name)) old_ = old;
    if (value) {
      setenv(name, value, 1);
    } else {
      unsetenv(name);
    }
  }
  ~ScopedEnv() {
    if (old_) {
      setenv(name_, old_->c_str(), 1);
    } else {
      unsetenv(name_);
    }
  }

 private:
  const char* name_;
  std::optional<std::string> old_;
};

TEST(ParallelForTest, VisitsEveryIndexOnce) {
  for (int jobs : {1, 2, 4, 16}) {
    std::vector<std::atomic<int>> hits(1000);
    ParallelFor(1000, jobs, [&](int i) { hits[i]++; });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
}

TEST(ParallelForTest, SlotResultsDoNotDependOnJobs) {
  const auto run = [](int jobs) {
    std::vector<double> out(500);
    ParallelFor(500, jobs, [&](int i) {
      double x = i;
      for (int k = 0; k < 100; ++k) x = x * 0.5 + 1.0 / (k + 1.0 + i);
      out[i] = x;
    });
    return out;
  };
  const std::vector<double> serial = run(1);
  EXPECT_EQ(run(3), serial);
  EXPECT_EQ(run(8), serial);
}

TEST(ParallelForTest, EmptyRangeIsNoop) {
  bool called = false;
  ParallelFor(0, 4, [&](int) { called = true; });
  ParallelFor(-3, 4, [&](int) { called = true; });
  EXPECT_FALSE(called);
}

TEST(ParallelForTest, RethrowsLowestFailingIndex) {
  for (int jobs : {1, 4}) {
    std::atomic<int> done{0};
    try {
      ParallelFor(100, jobs, [&](int i) {
        if (i == 17 || i == 60) throw std::runtime_error(std::to_string(i));
        ++done;
      });
      FAIL() << "expected an exception";
    } catch (const std::runtime_error& e) {
      EXPECT_STREQ(e.what(), "17");
    }
    if (jobs > 1) EXPECT_EQ(done.load(), 98);
  }
}

TEST(ParallelForTest, UsesSeveralThreads) {
  std::mutex mu;
  std::set<std::thread::id> ids;
  std::atomic<int> arrived{0};
  ParallelFor(4, 4, [&](int) {
    {
      std::lock_guard<std::mutex> lock(mu);
      ids.insert(std::this_thread::get_id());
    }
    // Hold every worker until all four have started.
    ++arrived;
    while (arrived.load() < 4) std::this_thread::yield();
  });
  EXPECT_EQ(ids.size(), 4u);
}

TEST(DefaultJobsTest, ReadsEnvironment) {
  {
    ScopedEnv env("EGOSDE_JOBS", "3");
    EXPECT_EQ(DefaultJobs(), 3);
  }
  const int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  for (const char* bad : {"0", "-2", "many"}) {
    ScopedEnv env("EGOSDE_JOBS", bad);
    EXPECT_EQ(DefaultJobs(), hw) << bad;
  }
  ScopedEnv env("EGOSDE_JOBS", nullptr);
  EXPECT_EQ(DefaultJobs(), hw);
}

}  // namespace
}  // namespace egosde
