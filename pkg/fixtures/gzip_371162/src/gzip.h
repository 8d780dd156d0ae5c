/* gzip.h - shared declarations. */

#ifndef GZIP_H
#define GZIP_H

#include <sys/types.h>
#include <sys/stat.h>

extern int level;
extern int keep_input;

int xopen (const char *name, int flags, int mode);
int xstat (const char *name, struct stat *st);
void progerror (const char *what);
long do_deflate (int in, int out, int lvl);
void build_trailer (char *buf, size_t len);
int treat_file (const char *name);

#endif /* GZIP_H */
