"""
Treebank Storage Locations

Reads and writes the text files translabel works with (CoNLL-U, label
files, models, reports) from any of:

- a local path (``.gz`` files are (de)compressed transparently)
- ``-`` for standard input / standard output
- ``s3://bucket/key`` objects; a ``s3://bucket/prefix/`` location ending in
  ``/`` resolves to the most recently modified treebank under the prefix

S3 access goes through boto3 using the ``s3`` section of the config file
when one is loaded, or boto3's default credential discovery otherwise.
"""

import gzip
import logging
import sys
from typing import Dict, Optional, Sequence, Tuple

import boto3
from botocore.exceptions import BotoCoreError, ClientError

from error_handler import StorageError


logger = logging.getLogger(__name__)

S3_SCHEME = "s3://"
STDIO = "-"
TREEBANK_SUFFIXES = (".conllu", ".conllu.gz")


def is_s3_location(location: str) -> bool:
    return location.startswith(S3_SCHEME)


def parse_s3_uri(location: str) -> Tuple[str, str]:
    """Split ``s3://bucket/key`` into (bucket, key)."""
    if not is_s3_location(location):
        raise StorageError(f"Not an S3 location: {location}")
    bucket, _, key = location[len(S3_SCHEME):].partition("/")
    if not bucket:
        raise StorageError(f"S3 location has no bucket: {location}")
    return bucket, key


def get_s3_client(config: Optional[Dict] = None):
    """
    Create an S3 client from the config file's ``s3`` section.

    Args:
        config (dict, optional): Loaded configuration

    Returns:
        boto3 S3 client
    """
    s3_config = (config or {}).get("s3", {})
    kwargs = {"region_name": s3_config.get("region", "us-east-1")}
    if s3_config.get("endpoint_url"):
        kwargs["endpoint_url"] = s3_config["endpoint_url"]

    if s3_config.get("access_key_id") and s3_config.get("secret_access_key"):
        logger.debug("Using S3 credentials from configuration file")
        kwargs["aws_access_key_id"] = s3_config["access_key_id"]
        kwargs["aws_secret_access_key"] = s3_config["secret_access_key"]
    else:
        logger.debug("Using Boto3's default credential discovery (~/.aws/credentials or IAM roles)")

    return boto3.client("s3", **kwargs)


# =============================================================================
# S3 OPERATIONS
# =============================================================================

def find_latest_object(
    s3_client,
    bucket: str,
    prefix: str = "",
    suffixes: Sequence[str] = TREEBANK_SUFFIXES
) -> Optional[str]:
    """
    Find the most recently modified object with one of the given suffixes.

    Args:
        s3_client: Boto3 S3 client instance
        bucket (str): S3 bucket name
        prefix (str): S3 key prefix to search within
        suffixes: Accepted key suffixes (case-insensitive)

    Returns:
        str: Key of the latest matching object, or None if none found
    """
    logger.info(f"Searching for latest {'/'.join(suffixes)} object in s3://{bucket}/{prefix}...")

    try:
        paginator = s3_client.get_paginator("list_objects_v2")
        pages = paginator.paginate(Bucket=bucket, Prefix=prefix) if prefix else paginator.paginate(Bucket=bucket)

        latest = None
        total_checked = 0
        matching = 0
        for page in pages:
            for obj in page.get("Contents", []):
                total_checked += 1
                if not obj["Key"].lower().endswith(tuple(s.lower() for s in suffixes)):
                    continue
                matching += 1
                if latest is None or obj["LastModified"] > latest["LastModified"]:
                    latest = obj
    except (ClientError, BotoCoreError) as e:
        raise StorageError(f"Could not list s3://{bucket}/{prefix}: {e}") from e

    logger.info(f"Checked {total_checked} objects, found {matching} matching")
    if latest is None:
        logger.warning(f"No matching objects under s3://{bucket}/{prefix}")
        return None

    logger.info(f"Found latest object: {latest['Key']} (Last Modified: {latest['LastModified']})")
    return latest["Key"]


def _read_s3(location: str, s3_client) -> str:
    bucket, key = parse_s3_uri(location)
    if not key or key.endswith("/"):
        latest = find_latest_object(s3_client, bucket, key)
        if latest is None:
            raise StorageError(f"No treebank found under {location}")
        key = latest

    try:
        response = s3_client.get_object(Bucket=bucket, Key=key)
        body = response["Body"].read()
    except (ClientError, BotoCoreError) as e:
        raise StorageError(f"Could not download s3://{bucket}/{key}: {e}") from e

    if key.endswith(".gz"):
        body = gzip.decompress(body)
    logger.info(f"Downloaded s3://{bucket}/{key} ({len(body):,} bytes)")
    return body.decode("utf-8")


def _write_s3(location: str, text: str, s3_client) -> None:
    bucket, key = parse_s3_uri(location)
    if not key or key.endswith("/"):
        raise StorageError(f"S3 output location needs an object key: {location}")

    body = text.encode("utf-8")
    if key.endswith(".gz"):
        body = gzip.compress(body, mtime=0)
    try:
        s3_client.put_object(Bucket=bucket, Key=key, Body=body)
    except (ClientError, BotoCoreError) as e:
        raise StorageError(f"Could not upload s3://{bucket}/{key}: {e}") from e
    logger.info(f"Uploaded s3://{bucket}/{key} ({len(body):,} bytes)")


# =============================================================================
# READ / WRITE
# =============================================================================

def read_text(location: str, config: Optional[Dict] = None, s3_client=None) -> str:
    """
    Read a whole UTF-8 text file from a local path, stdin or S3.

    Args:
        location (str): Path, ``-`` or ``s3://`` URI
        config (dict, optional): Loaded configuration (S3 settings)
        s3_client: Reuse an existing client instead of creating one

    Returns:
        str: File contents
    """
    if location == STDIO:
        return sys.stdin.read()
    if is_s3_location(location):
        return _read_s3(location, s3_client or get_s3_client(config))

    if location.endswith(".gz"):
        with gzip.open(location, "rt", encoding="utf-8") as f:
            return f.read()
    with open(location, "r", encoding="utf-8") as f:
        return f.read()


def write_text(location: str, text: str, config: Optional[Dict] = None, s3_client=None) -> None:
    """
    Write a whole UTF-8 text file to a local path, stdout or S3.

    Args:
        location (str): Path, ``-`` or ``s3://`` URI
        text (str): Contents
        config (dict, optional): Loaded configuration (S3 settings)
        s3_client: Reuse an existing client instead of creating one
    """
    if location == STDIO:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    if is_s3_location(location):
        _write_s3(location, text, s3_client or get_s3_client(config))
        return

    if location.endswith(".gz"):
        with gzip.open(location, "wt", encoding="utf-8", newline="") as f:
            f.write(text)
        return
    with open(location, "w", encoding="utf-8", newline="") as f:
        f.write(text)
