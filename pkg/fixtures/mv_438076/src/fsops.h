/* fsops.h - shared filesystem helper declarations. */

#ifndef FSOPS_H
#define FSOPS_H

#include <sys/types.h>

int make_backup_name (char *buf, size_t len, const char *base);
int block_transfer (int in_fd, int out_fd, size_t len);
int sync_metadata (const char *path);
int ensure_dir (const char *path);
int temp_slot (char *buf, size_t len);

#endif /* FSOPS_H */
