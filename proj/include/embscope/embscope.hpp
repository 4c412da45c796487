#pragma once

#include "embscope/dataset.hpp"
#include "embscope/error.hpp"
#include "embscope/ingest.hpp"
#include "embscope/linkage.hpp"
#include "embscope/model.hpp"
#include "embscope/pipeline.hpp"
#include "embscope/query.hpp"
#include "embscope/reduce/umap.hpp"
#include "embscope/service.hpp"
