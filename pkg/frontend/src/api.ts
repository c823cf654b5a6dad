// Thin fetch client for the analysis service. Every read goes through a
// request sequence number so an answer that arrives after a newer request
// was issued is dropped instead of overwriting fresher state.

import {
  DatasetInfo, JobView, MarginsResponse, ProgressEvent, SweepResult,
  WhatifResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(public code: string, message: string, public status: number) {
    super(message);
  }
}

export class Client {
  private seq = 0;

  constructor(public baseUrl: string) {}

  nextSeq(): number {
    return ++this.seq;
  }

  /** True when `seq` is still the latest issued request. */
  isCurrent(seq: number): boolean {
    return seq === this.seq;
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.baseUrl + path, init);
    const body = await response.json().catch(() => null);
    if (!response.ok) {
      const code = body?.code ?? `http_${response.status}`;
      throw new ApiError(code, body?.message ?? response.statusText,
                         response.status);
    }
    return body as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  uploadCsv(text: string): Promise<DatasetInfo> {
    return this.request<DatasetInfo>("/datasets", {
      method: "POST",
      headers: { "content-type": "text/csv" },
      body: text,
    });
  }

  columns(datasetId: string): Promise<DatasetInfo> {
    return this.request<DatasetInfo>(`/datasets/${datasetId}/columns`);
  }

  whatif(datasetId: string, payload: object): Promise<WhatifResponse> {
    return this.post<WhatifResponse>(`/datasets/${datasetId}/whatif`, payload);
  }

  margins(datasetId: string, payload: object): Promise<MarginsResponse> {
    return this.post<MarginsResponse>(`/datasets/${datasetId}/margins`,
                                      payload);
  }

  startSweep(datasetId: string, payload: object): Promise<{ job_id: string }> {
    return this.post<{ job_id: string }>(
      `/datasets/${datasetId}/recommendations`, payload);
  }

  job(jobId: string): Promise<JobView> {
    return this.request<JobView>(`/jobs/${jobId}`);
  }

  async jobEvents(jobId: string): Promise<ProgressEvent[]> {
    const response = await fetch(`${this.baseUrl}/jobs/${jobId}/events`);
    const text = await response.text();
    return text.trim().split("\n").filter(Boolean)
      .map((line) => JSON.parse(line) as ProgressEvent);
  }

  /** Poll a sweep job to a terminal state, reporting progress as it runs. */
  async runSweep(datasetId: string, payload: object,
                 onProgress?: (events: ProgressEvent[]) => void,
                 intervalMs = 400): Promise<SweepResult> {
    const { job_id } = await this.startSweep(datasetId, payload);
    for (;;) {
      const view = await this.job(job_id);
      if (onProgress) onProgress(await this.jobEvents(job_id));
      if (view.status === "done" && view.result) return view.result;
      if (view.status === "failed") {
        throw new ApiError("job_failed", view.error ?? "sweep failed", 500);
      }
      await new Promise((resolve) => setTimeout(resolve, intervalMs));
    }
  }
}
