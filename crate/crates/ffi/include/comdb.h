/* comdb C API: in-memory concept-oriented database engine. */

#ifndef COMDB_H
#define COMDB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes of every FFI call.
typedef enum ComdbStatus {
  COMDB_OK = 0,
  // A file could not be read, written or parsed.
  COMDB_ERR_IO = 1,
  // The query or command failed to parse, check or evaluate.
  COMDB_ERR_QUERY = 2,
  // A null pointer or malformed UTF-8 argument.
  COMDB_ERR_INVALID_ARGUMENT = 3,
} ComdbStatus;

// Opaque engine handle: one in-memory model plus its derived
// properties and the current constraint set.
typedef struct ComdbEngine ComdbEngine;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Create an engine with an empty model.
struct ComdbEngine *comdb_engine_new(void);

// Destroy an engine created by [`comdb_engine_new`]. Null is ignored.
void comdb_engine_free(struct ComdbEngine *engine);

// Release a string returned through an out-parameter. Null is ignored.
void comdb_string_free(char *text);

// The message of the most recent failure on this engine. The pointer
// stays valid until the next call on the same engine.
const char *comdb_last_error(const struct ComdbEngine *engine);

// Load a schema file and, when `data_path` is non-null, a data file.
// Replaces the engine's current model.
enum ComdbStatus comdb_load(struct ComdbEngine *engine,
                            const char *schema_path,
                            const char *data_path);

// Save the model as canonical schema and data files.
enum ComdbStatus comdb_save(struct ComdbEngine *engine,
                            const char *schema_path,
                            const char *data_path);

// Ingest the CSV files described by a TOML mapping file; paths inside
// the map resolve relative to the map's directory.
enum ComdbStatus comdb_import_csv(struct ComdbEngine *engine,
                                  const char *map_path,
                                  char **report_out);

// Evaluate a COQL query; the result arrives as JSON lines, one object
// per row keyed by column name.
enum ComdbStatus comdb_query_json(struct ComdbEngine *engine, const char *query, char **result_out);

// Evaluate a COQL query; the result arrives as tab-separated text with
// a header row.
enum ComdbStatus comdb_query_tsv(struct ComdbEngine *engine, const char *query, char **result_out);

// Run one shell command (`load`, `stats`, `flatten --tsv`, `constrain`,
// `propagate --down`, `infer`, ...); captured output is returned.
enum ComdbStatus comdb_execute(struct ComdbEngine *engine, const char *command, char **output_out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* COMDB_H */
