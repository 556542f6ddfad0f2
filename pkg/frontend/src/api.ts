// Typed client for the crowd-task REST API.

export type TaskView = {
  task_id: string
  kind: 'identification' | 'suggestion' | 'correction'
  post_id: string
  feature_id: string | null
  surface: string | null
  post_text: string
  prompt: string
  options: string[]
  allows_free_text: boolean
  quorum: number
  state: string
  answers: number
}

export type Choice = { option: number } | { text: string }

export type AggregateView = {
  task_id: string
  counts: Record<string, number>
  quorum_met: boolean
  resolved: boolean
  winner: string | null
}

export type Progress = {
  workers: number
  tasks_total: number
  tasks_open: number
  tasks_resolved: number
  tasks_exhausted: number
  answers_total: number
}

export class ApiError extends Error {
  constructor(public status: number, public code: string, message: string) {
    super(message)
  }
}

async function parseError(resp: Response): Promise<ApiError> {
  let code = 'HTTP_ERROR'
  let message = `HTTP ${resp.status}`
  try {
    const body = await resp.json()
    if (body && typeof body.code === 'string') code = body.code
    if (body && typeof body.message === 'string') message = body.message
  } catch {
    // non-JSON error body: keep the defaults
  }
  return new ApiError(resp.status, code, message)
}

export class ApiClient {
  constructor(
    private baseUrl: string = '',
    private fetchFn: typeof fetch = globalThis.fetch?.bind(globalThis),
  ) {}

  private async post<T>(path: string, payload: unknown): Promise<T> {
    const resp = await this.fetchFn(this.baseUrl + path, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(payload),
    })
    if (!resp.ok) throw await parseError(resp)
    return resp.json() as Promise<T>
  }

  private async get<T>(path: string): Promise<T> {
    const resp = await this.fetchFn(this.baseUrl + path)
    if (!resp.ok) throw await parseError(resp)
    return resp.json() as Promise<T>
  }

  async register(name: string, email: string): Promise<string> {
    const body = await this.post<{ worker_id: string }>('/workers', { name, email })
    return body.worker_id
  }

  async nextTasks(workerId: string, n = 10): Promise<{ tasks: TaskView[]; no_tasks_available: boolean }> {
    const params = new URLSearchParams({ worker_id: workerId, n: String(n) })
    return this.get(`/tasks/next?${params}`)
  }

  /**
   * Submit one answer. A 409 (duplicate answer / task already closed) counts
   * as success: the server already holds an answer for this pair, so a retry
   * must not surface as an error.
   */
  async submitAnswer(taskId: string, workerId: string, choice: Choice): Promise<'recorded' | 'already_recorded'> {
    try {
      await this.post<AggregateView>('/answers', {
        task_id: taskId,
        worker_id: workerId,
        choice,
      })
      return 'recorded'
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) return 'already_recorded'
      throw err
    }
  }

  async progress(): Promise<Progress> {
    return this.get('/progress')
  }
}
